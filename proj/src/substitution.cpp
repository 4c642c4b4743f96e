#include "libra/substitution.hpp"

#include <functional>
#include <unordered_map>

namespace libra::substitution {

using syntax::Arena;
using syntax::Expr;
using syntax::FormulaId;
using syntax::Node;
using syntax::Tag;
using syntax::TermId;

namespace {

// The §-clause walker. Kept separate from syntax::substitute so the two
// routes can be cross-checked against each other.
struct ClauseWalker {
  Arena& a;
  std::uint64_t i;
  TermId y;
  std::unordered_map<std::uint32_t, std::uint32_t> memo;

  std::uint32_t go(std::uint32_t id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node n = a.node(id);
    std::uint32_t r = id;
    switch (n.tag) {
      case Tag::Noema:
        r = (n.a == i) ? y.id : id;
        break;
      case Tag::Atom:
        r = a.atom(TermId{go(n.a)}, TermId{go(n.b)}).id;
        break;
      case Tag::JointFormula:
        r = a.joint_formula(FormulaId{go(n.a)}, FormulaId{go(n.b)}).id;
        break;
      case Tag::JointTerm:
        r = a.joint_term(TermId{go(n.a)}, TermId{go(n.b)}).id;
        break;
      case Tag::Universal:
        r = (n.a == i) ? id : a.universal(n.a, FormulaId{go(n.b)}).id;
        break;
      case Tag::Abstraction:
        r = (n.a == i) ? id : a.abstraction(n.a, FormulaId{go(n.b)}).id;
        break;
      case Tag::NumeralTerm: {
        const auto& ns = a.noemata(id);
        if (std::binary_search(ns.begin(), ns.end(), static_cast<std::uint32_t>(i)))
          throw Error(Errc::budget_exceeded, "sub: cannot descend an opaque numeral leaf");
        break;
      }
      default:
        break;  // fall-through clause
    }
    memo.emplace(id, r);
    return r;
  }
};

}  // namespace

CodedExpr sub(Arena& a, const CodedExpr& x, std::uint64_t i, const CodedExpr& y) {
  if (!y.expr.is_term) throw Error(Errc::not_term_code, "sub: y does not code a term");
  if (i > 0xffffffffull) return x;
  ClauseWalker w{a, i, y.expr.as_term(), {}};
  return CodedExpr{Expr{w.go(x.expr.id), x.expr.is_term}};
}

BigNat sub_raw(Arena& a, const BigNat& x, std::uint64_t i, const BigNat& y) {
  if (x == 0) return x;
  syntax::Expr decoded;
  try {
    std::string bits = bignat_to_binary(x);
    std::string austere;
    for (char c : bits) austere.push_back(c == '1' ? '|' : '.');
    decoded = syntax::parse(a, austere, syntax::Category::auto_detect).expr;
  } catch (const Error&) {
    return x;  // not a code of any of the clause shapes
  }
  const BigNat bar = 1, universalizor = 2, norifyer = 4;
  std::function<BigNat(std::uint32_t)> num = [&](std::uint32_t id) -> BigNat {
    const Node n = a.node(id);
    auto whole = [&](std::uint32_t sid) {
      return codec::value_of(a, Expr{sid, a.node(sid).tag < Tag::Atom});
    };
    switch (n.tag) {
      case Tag::Noema:
        if (n.a == i) return y;
        return codec::symbol_value(static_cast<std::uint64_t>(n.a) + 5);
      case Tag::Alethizor:
        return codec::symbol_value(3);
      case Tag::Enumerator:
        return codec::symbol_value(4);
      case Tag::Atom:
        return codec::concat(num(n.a), num(n.b));
      case Tag::JointTerm:
      case Tag::JointFormula:
        return codec::concat(codec::concat(norifyer, num(n.a)), num(n.b));
      case Tag::Universal:
        if (n.a == i) return whole(id);
        return codec::concat(
            codec::concat(universalizor, codec::symbol_value(static_cast<std::uint64_t>(n.a) + 5)),
            num(n.b));
      case Tag::Abstraction:
        if (n.a == i) return whole(id);
        return codec::concat(
            codec::concat(bar, codec::symbol_value(static_cast<std::uint64_t>(n.a) + 5)),
            num(n.b));
      default:
        return whole(id);
    }
  };
  return num(decoded.id);
}

CodedExpr Sub(Arena& a, const CodedExpr& x, const CodedExpr& y) {
  if (x.expr.is_term) return x;
  const auto& ns = a.noemata(x.expr.id);
  if (ns.empty()) return x;
  return sub(a, x, ns.front(), y);
}

CodedExpr SUB(Arena& a, const CodedExpr& x, const BigNat& y) {
  TermId numeral = goedel::numeral_expr(a, y);
  return Sub(a, x, CodedExpr{Expr::term(numeral)});
}

DiagonalResult diagonal(Arena& a, FormulaId A) {
  const auto& ns = a.noemata(A.id);
  if (!(ns.size() == 1 && ns[0] == 0))
    throw Error(Errc::wrong_noemata, "diagonal needs exactly the noema v0 present");

  DiagonalResult res{CodedExpr{}, goedel::CodeDag(0)};
  CodedExpr coded_a{Expr::formula(A)};
  res.m = coded_a.formation_value(a);
  res.m_code = goedel::goedel_code(res.m);

  CodedExpr route_clauses = SUB(a, coded_a, res.m);
  TermId numeral = goedel::numeral_expr(a, res.m);
  Expr route_subst = syntax::substitute(a, numeral, 0, Expr::formula(A));

  std::uint64_t occ = syntax::count_noema_occurrences(a, Expr::formula(A), 0);
  syntax::SymLen len_a = syntax::expr_bit_length_sym(a, Expr::formula(A));
  syntax::SymLen expected = len_a;
  expected.c -= BigNat(occ) * 6;
  expected.terms[res.m] += occ;
  syntax::SymLen len_b = syntax::expr_bit_length_sym(a, route_clauses.expr);

  bool routes_agree = route_clauses.expr == route_subst;
  bool length_ok = len_b == expected;
  res.B = route_clauses;
  res.verified = routes_agree && length_ok;

  nlohmann::json cert;
  cert["formula"] = syntax::print(a, Expr::formula(A), syntax::Form::presentable);
  cert["m"] = res.m.str();
  cert["occurrences_of_v0"] = occ;
  cert["inserted"] = "code(" + res.m.str() + ")";
  cert["routes_agree"] = routes_agree;
  cert["length_identity"] = length_ok;
  cert["verified"] = res.verified;
  cert["sentence"] = syntax::print(a, res.B.expr, syntax::Form::presentable);
  cert["trail"] = nlohmann::json::array(
      {"self-application target represented by the formula itself, insertion point v0",
       "Sub(m,m) meta-evaluated by numeral insertion: sub(m, 0, code(m))",
       "check 1: clause walker and plain substitution produce one interned DAG",
       "check 2: bit length of the result equals len(A) + occ·(L(m) − 6) exactly"});
  res.certificate = std::move(cert);
  return res;
}

}  // namespace libra::substitution
