#include "libra/codec.hpp"

namespace libra::codec {

BigNat value_of(const std::vector<std::uint64_t>& symbols) {
  BigNat v = 0;
  for (std::uint64_t k : symbols) {
    v <<= (k + 1);
    v |= symbol_value(k);
  }
  return v;
}

BigNat value_of(syntax::Arena& a, syntax::Expr e, std::uint64_t max_bits) {
  if (!syntax::expr_bit_length_capped(a, e, BigNat(max_bits)))
    throw Error(Errc::budget_exceeded, "value_of: formation exceeds bit budget");
  return value_of(syntax::flatten_symbols(a, e, max_bits));
}

std::vector<std::uint64_t> formation_of(const BigNat& n) {
  if (n == 0) throw Error(Errc::zero_not_formation, "0 is not a formation");
  std::vector<std::uint64_t> out;
  std::int64_t top = static_cast<std::int64_t>(boost::multiprecision::msb(n));
  std::int64_t i = top;
  while (i >= 0) {
    // i points at a set bit (the bar); count following zeros.
    std::int64_t j = i - 1;
    while (j >= 0 && !boost::multiprecision::bit_test(n, static_cast<unsigned>(j))) --j;
    out.push_back(static_cast<std::uint64_t>(i - 1 - j));
    i = j;
  }
  return out;
}

std::uint64_t length(const BigNat& n) { return bit_len(n); }

BigNat concat(const BigNat& m, const BigNat& n) {
  if (m == 0 || n == 0) throw Error(Errc::zero_operand, "concat needs positive operands");
  BigNat r = m;
  r <<= length(n);
  r += n;
  return r;
}

}  // namespace libra::codec
