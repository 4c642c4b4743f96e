#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace libra {

// Arbitrary-precision natural number. Negative values never occur; the few
// subtractions in the codebase are guarded.
using BigNat = boost::multiprecision::cpp_int;

// l(n) = μy(2^y > n). l(0) = 0 under the μ reading.
inline std::uint64_t bit_len(const BigNat& n) {
  if (n == 0) return 0;
  return static_cast<std::uint64_t>(boost::multiprecision::msb(n)) + 1;
}

inline BigNat bignat_from_binary(const std::string& bits) {
  BigNat v = 0;
  for (char c : bits) {
    v <<= 1;
    if (c == '1') v |= 1;
  }
  return v;
}

inline std::string bignat_to_binary(const BigNat& n) {
  if (n == 0) return "0";
  std::string out;
  std::uint64_t len = bit_len(n);
  out.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) {
    out.push_back(boost::multiprecision::bit_test(n, len - 1 - i) ? '1' : '0');
  }
  return out;
}

}  // namespace libra
