#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "libra/codec.hpp"
#include "test_util.hpp"

using namespace libra;

namespace {

// Independent oracle: read a bar/dot string as a base-2 numeral.
BigNat binary_oracle(const std::string& bars) {
  BigNat v = 0;
  for (char c : bars) v = v * 2 + (c == '|' ? 1 : 0);
  return v;
}

// Independent oracle for l(n) = μy(2^y > n).
std::uint64_t mu_length(const BigNat& n) {
  std::uint64_t y = 0;
  BigNat p = 1;
  while (p <= n) {
    p *= 2;
    ++y;
  }
  return y;
}

BigNat rand_bignat(std::mt19937& rng, int max_bits) {
  int bits = std::uniform_int_distribution<int>(1, max_bits)(rng);
  BigNat v = 1;
  for (int i = 1; i < bits; ++i) v = v * 2 + std::uniform_int_distribution<int>(0, 1)(rng);
  return v;
}

}  // namespace

TEST_CASE("symbol and formation values") {
  CHECK(codec::value_of({0}) == 1);       // "|"
  CHECK(codec::value_of({1}) == 2);       // "|."
  CHECK(codec::value_of({3, 3}) == 136);  // "|...|..." = T∈T
  CHECK(codec::value_of({3, 3}) == binary_oracle("|...|..."));
  CHECK(codec::symbol_value(5) == 32);
}

TEST_CASE("formation_of splits maximal bar-dot blocks") {
  CHECK(codec::formation_of(1) == std::vector<std::uint64_t>{0});
  CHECK(codec::formation_of(6) == std::vector<std::uint64_t>{0, 1});  // "||."
  CHECK_THROWS_AS(codec::formation_of(0), Error);
  for (std::uint32_t n = 1; n < 4096; ++n) {
    CHECK(codec::value_of(codec::formation_of(n)) == n);
  }
}

TEST_CASE("length is the mu definition") {
  CHECK(codec::length(1) == 1);
  CHECK(codec::length(6) == 3);
  CHECK(codec::length(0) == 0);
  for (std::uint64_t k = 0; k <= 64; ++k) {
    BigNat p = BigNat(1) << k;
    CHECK(codec::length(p) == k + 1);
    CHECK(codec::length(p) == mu_length(p));
  }
}

TEST_CASE("concat matches string concatenation") {
  CHECK(codec::concat(1, 2) == 6);
  CHECK(codec::concat(16, 16) == 528);  // € ∈ €
  CHECK_THROWS_AS(codec::concat(0, 1), Error);
  CHECK_THROWS_AS(codec::concat(1, 0), Error);
  std::mt19937 rng(7);
  for (int i = 0; i < 10000; ++i) {
    BigNat m = rand_bignat(rng, 48), n = rand_bignat(rng, 48);
    CHECK(codec::length(codec::concat(m, n)) == codec::length(m) + codec::length(n));
  }
}

TEST_CASE("concat associativity") {
  std::mt19937 rng(8);
  for (int i = 0; i < 10000; ++i) {
    BigNat x = rand_bignat(rng, 40), y = rand_bignat(rng, 40), z = rand_bignat(rng, 40);
    CHECK(codec::concat(codec::concat(x, y), z) == codec::concat(x, codec::concat(y, z)));
  }
}

TEST_CASE("expression value equals the concat fold of its symbols") {
  syntax::Arena a;
  testutil::Gen gen(a, 11);
  for (int i = 0; i < 200; ++i) {
    auto e = gen.expr(4);
    auto syms = syntax::flatten_symbols(a, e);
    BigNat fold = codec::symbol_value(syms[0]);
    for (std::size_t k = 1; k < syms.size(); ++k)
      fold = codec::concat(fold, codec::symbol_value(syms[k]));
    CHECK(codec::value_of(a, e) == fold);
  }
}
