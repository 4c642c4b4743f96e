#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "libra/bignat.hpp"
#include "libra/goedel.hpp"
#include "libra/syntax.hpp"

namespace libra::substitution {

// An expression together with its code; the code side is derived on demand
// (the numeral for a formation number is immense even for small formulas).
struct CodedExpr {
  syntax::Expr expr;

  BigNat formation_value(syntax::Arena& a, std::uint64_t max_bits = 1u << 22) const {
    return codec::value_of(a, expr, max_bits);
  }
  goedel::CodeDag code(syntax::Arena& a, std::uint64_t max_bits = 1u << 22) const {
    return goedel::goedel_code(formation_value(a, max_bits));
  }
};

// Code-level substitution, clause by clause on the decoded structure.
// y must code a term (NotTermCode otherwise).
CodedExpr sub(syntax::Arena& a, const CodedExpr& x, std::uint64_t i, const CodedExpr& y);

// The same recursion on raw naturals: x is decoded, the clauses recompose
// numbers with ⌢, and y is spliced unexamined; numbers that decode to
// neither category fall through unchanged.
BigNat sub_raw(syntax::Arena& a, const BigNat& x, std::uint64_t i, const BigNat& y);

// Sub(x,y) = sub(x, least present noema, y) on formula codes, else x.
CodedExpr Sub(syntax::Arena& a, const CodedExpr& x, const CodedExpr& y);

// SUB(x,y) = Sub(x, ⌜y⌝): numeral insertion, the dotted ⌜A(ẏ)⌝.
CodedExpr SUB(syntax::Arena& a, const CodedExpr& x, const BigNat& y);

struct DiagonalResult {
  CodedExpr B;
  goedel::CodeDag m_code;
  BigNat m = 0;
  bool verified = false;
  nlohmann::json certificate;
};

// Diagonal constructor for A with ℵ(A) = {0}: m is A's own formation
// number (standing in for the code of A(Sub(x,x)), recorded in the trail),
// B = A with the numeral ⌜m⌝ inserted at v0. The certificate checks that
// two independent substitution routes yield the identical DAG and that the
// exact bit-length identity len(B) = len(A) + occ·(L(m) − 6) holds.
DiagonalResult diagonal(syntax::Arena& a, syntax::FormulaId A);

}  // namespace libra::substitution
