#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "libra/codec.hpp"
#include "libra/goedel.hpp"
#include "libra/substitution.hpp"
#include "test_util.hpp"

using namespace libra;
using namespace libra::syntax;
using substitution::CodedExpr;

namespace {

CodedExpr coded(Expr e) { return CodedExpr{e}; }

// Generate a formula guaranteed to contain the noema i free.
FormulaId formula_with(testutil::Gen& gen, Arena& a, std::uint32_t i, int depth) {
  for (;;) {
    FormulaId f = gen.formula(depth);
    const auto& ns = a.noemata(f.id);
    if (std::binary_search(ns.begin(), ns.end(), i)) return f;
  }
}

}  // namespace

TEST_CASE("sub base clauses") {
  Arena a;
  CodedExpr v0 = coded(Expr::term(a.noema(0)));
  CodedExpr t = coded(Expr::term(a.alethizor()));
  CHECK(substitution::sub(a, v0, 0, t).expr == t.expr);
  CodedExpr v1 = coded(Expr::term(a.noema(1)));
  CHECK(substitution::sub(a, v1, 0, t).expr == v1.expr);
  // Binder stop.
  FormulaId self = a.universal(0, a.atom(a.noema(0), a.noema(0)));
  CHECK(substitution::sub(a, coded(Expr::formula(self)), 0, t).expr == Expr::formula(self));
  // y must code a term.
  CHECK_THROWS_AS(substitution::sub(a, v0, 0, coded(Expr::formula(self))), Error);
}

TEST_CASE("key identity on generated pairs, three routes") {
  Arena a;
  testutil::Gen gen(a, 21);
  int done = 0;
  while (done < 200) {
    std::uint32_t i = gen.pick(3);
    FormulaId A = formula_with(gen, a, i, 4);
    TermId t = gen.term(4);
    // Route 1: the clause walker.
    Expr r1 = substitution::sub(a, coded(Expr::formula(A)), i, coded(Expr::term(t))).expr;
    // Route 2: the plain substitution function.
    Expr r2 = substitute(a, t, i, Expr::formula(A));
    CHECK(r1 == r2);
    // Route 3: the raw course-of-values recursion on the numbers.
    BigNat xa = codec::value_of(a, Expr::formula(A));
    BigNat yt = codec::value_of(a, Expr::term(t));
    CHECK(substitution::sub_raw(a, xa, i, yt) == codec::value_of(a, r1));
    ++done;
  }
}

TEST_CASE("sub_raw falls through on non-codes") {
  Arena a;
  CHECK(substitution::sub_raw(a, 1, 0, 8) == 1);   // lone sortifier
  CHECK(substitution::sub_raw(a, 5, 0, 8) == 5);   // "|.|": universalizor, sortifier
  CHECK(substitution::sub_raw(a, 22, 0, 8) == 22); // "|.||." : no category
  CHECK(substitution::sub_raw(a, 8, 3, 16) == 8);  // T has nothing to substitute
}

TEST_CASE("Sub picks the least present noema") {
  Arena a;
  // v3 ∈ v1: least present index is 1.
  FormulaId f = a.atom(a.noema(1), a.noema(3));
  CodedExpr t = coded(Expr::term(a.alethizor()));
  Expr r = substitution::Sub(a, coded(Expr::formula(f)), t).expr;
  CHECK(r == Expr::formula(a.atom(a.alethizor(), a.noema(3))));
  // Noema-free input is untouched.
  FormulaId closed = a.atom(a.alethizor(), a.alethizor());
  CHECK(substitution::Sub(a, coded(Expr::formula(closed)), t).expr == Expr::formula(closed));
}

TEST_CASE("Sub composed twice agrees with simultaneous substitution") {
  Arena a;
  testutil::Gen gen(a, 33);
  int done = 0;
  while (done < 100) {
    FormulaId A = gen.formula(3);
    const auto& ns = a.noemata(A.id);
    if (ns.size() < 2) continue;
    std::uint32_t i = ns[0], j = ns[1];
    TermId t1 = a.alethizor();
    TermId t2 = a.enumerator();
    Expr seq = substitution::Sub(
                   a, substitution::Sub(a, coded(Expr::formula(A)), coded(Expr::term(t1))),
                   coded(Expr::term(t2)))
                   .expr;
    // Simultaneous two-index substitution with disjoint closed replacements.
    Expr sim = substitute(a, t2, j, substitute(a, t1, i, Expr::formula(A)));
    CHECK(seq == sim);
    ++done;
  }
}

TEST_CASE("SUB inserts the numeral term") {
  Arena a;
  FormulaId f = a.atom(a.alethizor(), a.noema(0));  // v0 ∈ T
  Expr r = substitution::SUB(a, coded(Expr::formula(f)), 0).expr;
  TermId zero = goedel::numeral_expr(a, 0);
  CHECK(r == Expr::formula(a.atom(a.alethizor(), zero)));
  // Cross-check on the numbers: splice the materialized code.
  BigNat m0 = goedel::materialize(goedel::goedel_code(0), 2048);
  BigNat direct = substitution::sub_raw(a, codec::value_of(a, Expr::formula(f)), 0, m0);
  CHECK(direct == codec::value_of(a, r, 1u << 12));
  // Noema-free codes are untouched.
  FormulaId closed = a.atom(a.alethizor(), a.alethizor());
  CHECK(substitution::SUB(a, coded(Expr::formula(closed)), 7).expr == Expr::formula(closed));
}

TEST_CASE("SUB length bookkeeping") {
  Arena a;
  testutil::Gen gen(a, 55);
  int done = 0;
  while (done < 50) {
    FormulaId A = formula_with(gen, a, 0, 3);
    const auto& ns = a.noemata(A.id);
    if (ns.front() != 0) continue;  // least present must be v0
    for (BigNat y : {BigNat(0), BigNat(1), BigNat(2)}) {
      BigNat before = *expr_bit_length_capped(a, Expr::formula(A), BigNat(1) << 30);
      Expr r = substitution::SUB(a, coded(Expr::formula(A)), y).expr;
      BigNat after = *expr_bit_length_capped(a, r, BigNat(1) << 40);
      BigNat occ = count_noema_occurrences(a, Expr::formula(A), 0);
      BigNat ly = goedel::goedel_code(y).bit_length_exact();
      CHECK(after == before + occ * (ly - 6));
    }
    ++done;
  }
}

TEST_CASE("diagonal certificates") {
  Arena a;
  // x ∈ T
  FormulaId xt = a.atom(a.alethizor(), a.noema(0));
  auto r1 = substitution::diagonal(a, xt);
  CHECK(r1.verified);
  CHECK(r1.m == 544);  // |_3|_5 read in binary
  CHECK(r1.m_code.source() == 544);
  CHECK(r1.certificate["routes_agree"] == true);
  CHECK(r1.certificate["length_identity"] == true);
  // Tautological in x.
  FormulaId taut = f_imp(a, xt, xt);
  auto r2 = substitution::diagonal(a, taut);
  CHECK(r2.verified);
  CHECK(r2.certificate["occurrences_of_v0"] == 6);
  // Wrong noemata.
  FormulaId two = a.atom(a.noema(1), a.noema(0));
  CHECK_THROWS_AS(substitution::diagonal(a, two), Error);
  FormulaId none = a.atom(a.alethizor(), a.alethizor());
  CHECK_THROWS_AS(substitution::diagonal(a, none), Error);
}
