#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "libra/codec.hpp"
#include "libra/goedel.hpp"
#include "test_util.hpp"

using namespace libra;

namespace {

// Oracle copies of the coding inventories, summed by hand before trusting
// the implementation. -1 marks the embedded code, -2 the repeated block.
constexpr std::array<std::int64_t, 21> kZero = {0, 5, 1, 6, 2, 2, 2, 6, 5, 6, 5,
                                                6, 5, 2, 2, 6, 5, 6, 5, 6, 5};
constexpr std::array<std::int64_t, 11> kSucc = {0, 5, 2, 2, -1, 5, -2, 2, -1, 5, -2};
constexpr std::array<std::int64_t, 19> kTri = {1, 5, 2, 2, 2, 5, 6, 5, 6,
                                               5, -1, 2, 2, 5, 6, 5, 6, 5, -1};

std::uint64_t fixed_bits(const auto& arr) {
  std::uint64_t total = 0;
  for (auto k : arr)
    if (k >= 0) total += static_cast<std::uint64_t>(k) + 1;
  return total;
}

std::string oracle_string(std::uint64_t n) {
  auto symbol = [](std::uint64_t k) {
    std::string s = "1";
    s.append(k, '0');
    return s;
  };
  std::string cur;
  for (auto k : kZero) cur += symbol(static_cast<std::uint64_t>(k));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string tri;
    for (auto k : kTri) tri += k < 0 ? cur : symbol(static_cast<std::uint64_t>(k));
    std::string next;
    for (auto k : kSucc)
      next += k == -1 ? cur : (k == -2 ? tri : symbol(static_cast<std::uint64_t>(k)));
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

TEST_CASE("fixed bit counts straight off the symbol inventories") {
  CHECK(fixed_bits(kZero) == 109);
  CHECK(fixed_bits(kSucc) == 28);
  CHECK(fixed_bits(kTri) == 87);
  // C = 28 + 2·87, so L(n+1) = 202 + 6·L(n).
  CHECK(fixed_bits(kSucc) + 2 * fixed_bits(kTri) == 202);
}

TEST_CASE("bit length recurrence") {
  CHECK(goedel::goedel_code(0).bit_length_exact() == 109);
  CHECK(goedel::goedel_code(1).bit_length_exact() == 856);
  CHECK(goedel::goedel_code(1).bit_length_exact() == 202 + 6 * 109);
  BigNat expected = 109;
  for (int n = 1; n <= 10; ++n) {
    expected = 202 + 6 * expected;
    CHECK(goedel::goedel_code(n).bit_length_exact(BigNat(1) << 40) == expected);
  }
}

TEST_CASE("materialization matches the oracle recursion") {
  for (std::uint64_t n = 0; n <= 2; ++n) {
    auto code = goedel::goedel_code(n);
    std::string got = goedel::materialize_string(code, 1u << 16);
    CHECK(got == oracle_string(n));
    CHECK(got.size() == code.bit_length_exact());
  }
  // Leading-bit estimate: the base code is a 109-bit number, so ≈ 2^108.
  BigNat v = goedel::materialize(goedel::goedel_code(0), 2048);
  CHECK(bit_len(v) == 109);
}

TEST_CASE("materialized base parses as a caliber-0 pronomen") {
  syntax::Arena a;
  std::string bits = goedel::materialize_string(goedel::goedel_code(0), 2048);
  std::string austere;
  for (char c : bits) austere.push_back(c == '1' ? '|' : '.');
  auto r = syntax::parse(a, austere, syntax::Category::term);
  auto cls = syntax::classify_term(a, r.expr.as_term());
  CHECK(cls.pronomen);
  CHECK(syntax::caliber(a, r.expr.as_term()) == 0);
  CHECK(syntax::print(a, r.expr, syntax::Form::presentable) ==
        "{v0 | all v1. ((v0 in v1) -> (v0 in v1))}");
}

TEST_CASE("naming adequacy: no alethizor or enumerator in small codes") {
  syntax::Arena a;
  for (std::uint64_t n = 0; n <= 2; ++n) {
    syntax::TermId t = goedel::numeral_expr(a, n);
    CHECK(!a.contains_alethizor(t.id));
    CHECK(!a.contains_enumerator(t.id));
    // The literal successor block leaves v1 free for n ≥ 1; only the base
    // is a cognomen.
    if (n == 0)
      CHECK(a.noemata(t.id).empty());
    else
      CHECK(a.noemata(t.id) == std::vector<std::uint32_t>{1});
  }
}

TEST_CASE("numeral expressions flatten to the materialized strings") {
  syntax::Arena a;
  for (std::uint64_t n = 0; n <= 3; ++n) {
    syntax::TermId t = goedel::numeral_expr(a, n);
    auto syms = syntax::flatten_symbols(a, syntax::Expr::term(t));
    std::string bits;
    for (auto k : syms) {
      bits.push_back('1');
      bits.append(k, '0');
    }
    CHECK(bits == goedel::materialize_string(goedel::goedel_code(n), 1u << 18));
  }
}

TEST_CASE("budgeted materialization") {
  CHECK_THROWS_AS(goedel::materialize(goedel::goedel_code(3), 1000), Error);
  try {
    goedel::materialize(goedel::goedel_code(3), 1000);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::budget_exceeded);
    CHECK(std::string(e.what()).find("32230") != std::string::npos);
  }
}

TEST_CASE("code concat is the code of the concatenation") {
  CHECK(goedel::code_concat(1, 2).source() == 6);
  CHECK_THROWS_AS(goedel::code_concat(0, 2), Error);
  std::mt19937 rng(12);
  for (int i = 0; i < 100; ++i) {
    BigNat e = 1 + rng() % 100000, f = 1 + rng() % 100000;
    CHECK(goedel::code_concat(e, f).source() == codec::concat(e, f));
  }
  CHECK(goedel::code_concat(1, 2).bit_length_exact() ==
        goedel::goedel_code(6).bit_length_exact());
}

TEST_CASE("injectivity on small sources") {
  for (std::uint64_t n = 0; n <= 50; ++n)
    for (std::uint64_t m = n + 1; m <= 50; ++m)
      CHECK(goedel::goedel_code(n).source() != goedel::goedel_code(m).source());
  CHECK(goedel::materialize(goedel::goedel_code(0), 1u << 16) !=
        goedel::materialize(goedel::goedel_code(1), 1u << 16));
  CHECK(goedel::materialize(goedel::goedel_code(1), 1u << 16) !=
        goedel::materialize(goedel::goedel_code(2), 1u << 16));
}

TEST_CASE("numeral leaves above the expansion bound") {
  syntax::Arena a;
  syntax::TermId t = goedel::numeral_expr(a, 100000);
  CHECK(a.is_numeral_leaf(t.id));
  auto len = syntax::expr_bit_length_sym(a, syntax::Expr::term(t));
  CHECK(len.terms.size() == 1);
  CHECK(len.terms.begin()->first == 100000);
  CHECK(len.c == 0);
  // Opaque leaves refuse austere flattening.
  CHECK_THROWS_AS(syntax::flatten_symbols(a, syntax::Expr::term(t)), Error);
  CHECK(syntax::print(a, syntax::Expr::term(t), syntax::Form::presentable) == "code(100000)");
}
