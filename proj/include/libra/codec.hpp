#pragma once

#include <cstdint>
#include <vector>

#include "libra/bignat.hpp"
#include "libra/error.hpp"
#include "libra/syntax.hpp"

namespace libra::codec {

// Value of one symbol |_k under the bar=1/dot=0 policy.
inline BigNat symbol_value(std::uint64_t k) {
  BigNat v = 1;
  return v << k;
}

// Binary reading of a formation, leftmost symbol most significant.
BigNat value_of(const std::vector<std::uint64_t>& symbols);
BigNat value_of(syntax::Arena& a, syntax::Expr e, std::uint64_t max_bits = 1u << 22);

// Inverse: split the bit string into maximal 1·0^k blocks.
std::vector<std::uint64_t> formation_of(const BigNat& n);

// l(n) = μy(2^y > n).
std::uint64_t length(const BigNat& n);

// m⌢n = m·2^l(n) + n, for m,n ≥ 1.
BigNat concat(const BigNat& m, const BigNat& n);

}  // namespace libra::codec
