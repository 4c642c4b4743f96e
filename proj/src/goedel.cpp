#include "libra/goedel.hpp"

#include <array>

namespace libra::goedel {

namespace {

// §-literal symbol inventories (bare indices).
constexpr std::array<std::uint64_t, 21> kZeroSymbols = {
    0, 5, 1, 6, 2, 2, 2, 6, 5, 6, 5, 6, 5, 2, 2, 6, 5, 6, 5, 6, 5};
// Successor wrapper: ^ v0 ↓ ↓ ⌜n⌝ v0 △ ↓ ⌜n⌝ v0 △   (⌜n⌝/△ marked -1/-2)
constexpr std::array<std::int64_t, 11> kSucc = {0, 5, 2, 2, -1, 5, -2, 2, -1, 5, -2};
// △ block: ∀ v0 ↓↓↓ v0v1 v0v1 v0⌜n⌝ ↓↓ v0v1 v0v1 v0⌜n⌝
constexpr std::array<std::int64_t, 19> kTri = {1, 5, 2, 2, 2, 5, 6, 5, 6,
                                               5, -1, 2, 2, 5, 6, 5, 6, 5, -1};

std::string zero_string() {
  std::string s;
  for (auto k : kZeroSymbols) {
    s.push_back('1');
    s.append(static_cast<std::size_t>(k), '0');
  }
  return s;
}

void append_sym(std::string& s, std::uint64_t k) {
  s.push_back('1');
  s.append(static_cast<std::size_t>(k), '0');
}

}  // namespace

std::optional<BigNat> CodeDag::bit_length(const BigNat& cap) const {
  BigNat len = 109;
  if (len > cap) return std::nullopt;
  for (BigNat k = 0; k < source_; ++k) {
    len = 202 + 6 * len;
    if (len > cap) return std::nullopt;
  }
  return len;
}

BigNat CodeDag::bit_length_exact(const BigNat& cap) const {
  auto r = bit_length(cap);
  if (!r) throw Error(Errc::budget_exceeded, "code bit_length exceeds cap");
  return *r;
}

CodeDag goedel_code(const BigNat& n) { return CodeDag(n); }

CodeDag code_concat(const BigNat& e, const BigNat& f) {
  return CodeDag(codec::concat(e, f));
}

std::string materialize_string(const CodeDag& c, std::uint64_t budget_bits) {
  auto len = c.bit_length(BigNat(budget_bits));
  if (!len) {
    auto probe = c.bit_length(BigNat(1) << 24);
    std::string need = probe ? probe->str() : std::string("more than 2^24");
    throw Error(Errc::budget_exceeded,
                "materialize: code needs " + need + " bits, budget " +
                    std::to_string(budget_bits));
  }
  std::string cur = zero_string();
  BigNat n = c.source();
  for (BigNat k = 0; k < n; ++k) {
    std::string tri;
    for (auto s : kTri) {
      if (s < 0)
        tri += cur;
      else
        append_sym(tri, static_cast<std::uint64_t>(s));
    }
    std::string next;
    next.reserve(28 + 2 * cur.size() + 2 * tri.size());
    for (auto s : kSucc) {
      if (s == -1)
        next += cur;
      else if (s == -2)
        next += tri;
      else
        append_sym(next, static_cast<std::uint64_t>(s));
    }
    cur = std::move(next);
  }
  return cur;
}

BigNat materialize(const CodeDag& c, std::uint64_t budget_bits) {
  return bignat_from_binary(materialize_string(c, budget_bits));
}

syntax::TermId numeral_expr(syntax::Arena& a, const BigNat& n) { return a.numeral_term(n); }

}  // namespace libra::goedel
