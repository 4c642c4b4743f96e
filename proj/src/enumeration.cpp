#include "libra/enumeration.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "libra/codec.hpp"
#include "libra/error.hpp"

namespace libra::enumeration {

using syntax::Arena;
using syntax::Expr;
using syntax::FormulaId;
using syntax::Node;
using syntax::Tag;
using syntax::TermId;

namespace {

Verdict v_and(Verdict a, Verdict b) {
  if (a == Verdict::not_variant || b == Verdict::not_variant) return Verdict::not_variant;
  if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
  return Verdict::variant;
}
Verdict v_or(Verdict a, Verdict b) {
  if (a == Verdict::variant || b == Verdict::variant) return Verdict::variant;
  if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
  return Verdict::not_variant;
}

// Canonical binder renaming: binders are renumbered in traversal order so
// α-equivalent propositions become structurally identical.
FormulaId canonicalize(Arena& a, FormulaId f) {
  std::uint32_t counter = 0;
  std::map<std::uint32_t, std::uint32_t> env;
  std::function<std::uint32_t(std::uint32_t)> go = [&](std::uint32_t id) -> std::uint32_t {
    const Node n = a.node(id);
    switch (n.tag) {
      case Tag::Noema: {
        auto it = env.find(n.a);
        return it == env.end() ? id : a.noema(it->second).id;
      }
      case Tag::Alethizor:
      case Tag::Enumerator:
      case Tag::NumeralTerm:
        return id;
      case Tag::JointTerm:
        return a.joint_term(TermId{go(n.a)}, TermId{go(n.b)}).id;
      case Tag::Atom:
        return a.atom(TermId{go(n.a)}, TermId{go(n.b)}).id;
      case Tag::JointFormula:
        return a.joint_formula(FormulaId{go(n.a)}, FormulaId{go(n.b)}).id;
      case Tag::Abstraction:
      case Tag::Universal: {
        std::uint32_t fresh = 0x80000000u + counter++;
        auto saved = env.find(n.a) == env.end() ? std::optional<std::uint32_t>{}
                                                : std::optional<std::uint32_t>{env[n.a]};
        env[n.a] = fresh;
        std::uint32_t body = go(n.b);
        if (saved)
          env[n.a] = *saved;
        else
          env.erase(n.a);
        return n.tag == Tag::Abstraction ? a.abstraction(fresh, FormulaId{body}).id
                                         : a.universal(fresh, FormulaId{body}).id;
      }
    }
    return id;
  };
  return FormulaId{go(f.id)};
}

struct VariantCheck {
  Arena& a;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Verdict> term_memo;

  Verdict term(std::uint32_t x, std::uint32_t y) {
    if (x == y) return Verdict::variant;
    auto key = std::minmax(x, y);
    auto it = term_memo.find(key);
    if (it != term_memo.end()) return it->second;
    term_memo[key] = Verdict::not_variant;  // cycle block; overwritten below
    const Node nx = a.node(x);
    const Node ny = a.node(y);
    Verdict r = Verdict::not_variant;
    if (nx.tag == Tag::JointTerm && ny.tag == Tag::JointTerm) {
      r = v_or(v_and(term(nx.a, ny.a), term(nx.b, ny.b)),
               v_and(term(nx.a, ny.b), term(nx.b, ny.a)));
    } else if (nx.tag == Tag::Abstraction && ny.tag == Tag::Abstraction) {
      FormulaId cx = syntax::f_exists(a, nx.a, FormulaId{nx.b});
      FormulaId cy = syntax::f_exists(a, ny.a, FormulaId{ny.b});
      r = prop(canonicalize(a, cx), canonicalize(a, cy));
    } else if (nx.tag == Tag::NumeralTerm || ny.tag == Tag::NumeralTerm) {
      // Distinct opaque numerals: abstraction-shaped, cannot be expanded.
      bool other_abs = (nx.tag == Tag::Abstraction || ny.tag == Tag::Abstraction ||
                        nx.tag == Tag::NumeralTerm || ny.tag == Tag::NumeralTerm);
      r = other_abs ? Verdict::unknown : Verdict::not_variant;
    }
    term_memo[key] = r;
    return r;
  }

  // Letter equality: atoms compare componentwise; cognomen components by
  // full variance, open components structurally (noemata must match).
  Verdict letter_component(std::uint32_t x, std::uint32_t y) {
    if (x == y) return Verdict::variant;
    const Node nx = a.node(x);
    const Node ny = a.node(y);
    bool cx = a.noemata(x).empty();
    bool cy = a.noemata(y).empty();
    if (cx && cy) return term(x, y);
    if (cx != cy) return Verdict::not_variant;
    if (nx.tag != ny.tag) return Verdict::not_variant;
    switch (nx.tag) {
      case Tag::Noema:
        return nx.a == ny.a ? Verdict::variant : Verdict::not_variant;
      case Tag::JointTerm:
        return v_and(letter_component(nx.a, ny.a), letter_component(nx.b, ny.b));
      case Tag::Abstraction:
        if (nx.a != ny.a) return Verdict::unknown;
        return letter_formula(nx.b, ny.b);
      default:
        return Verdict::unknown;
    }
  }

  Verdict letter_formula(std::uint32_t x, std::uint32_t y) {
    if (x == y) return Verdict::variant;
    const Node nx = a.node(x);
    const Node ny = a.node(y);
    if (nx.tag != ny.tag) return Verdict::not_variant;
    switch (nx.tag) {
      case Tag::Atom:
        return v_and(letter_component(nx.a, ny.a), letter_component(nx.b, ny.b));
      case Tag::Universal:
        if (nx.a != ny.a) return Verdict::unknown;
        return prop(FormulaId{nx.b}, FormulaId{ny.b});
      case Tag::JointFormula:
        return v_and(letter_formula(nx.a, ny.a), letter_formula(nx.b, ny.b));
      default:
        return Verdict::unknown;
    }
  }

  // Propositional equivalence treating atoms and universals as letters.
  Verdict prop(FormulaId x, FormulaId y) {
    std::vector<std::uint32_t> letters;
    bool quantified = false;
    std::function<void(std::uint32_t)> collect = [&](std::uint32_t id) {
      const Node n = a.node(id);
      if (n.tag == Tag::JointFormula) {
        collect(n.a);
        collect(n.b);
        return;
      }
      if (n.tag == Tag::Universal) quantified = true;
      letters.push_back(id);
    };
    collect(x.id);
    collect(y.id);

    // Partition letters into classes by pairwise comparison.
    std::vector<std::uint32_t> reps;
    std::map<std::uint32_t, std::size_t> cls;
    bool any_unknown = false;
    for (std::uint32_t l : letters) {
      if (cls.count(l)) continue;
      std::size_t assigned = SIZE_MAX;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        Verdict v = compare_letters(l, reps[r]);
        if (v == Verdict::variant) {
          assigned = r;
          break;
        }
        if (v == Verdict::unknown) any_unknown = true;
      }
      if (assigned == SIZE_MAX) {
        reps.push_back(l);
        assigned = reps.size() - 1;
      }
      cls[l] = assigned;
    }
    if (reps.size() > 14) return Verdict::unknown;
    // Truth table over the letter classes.
    std::function<bool(std::uint32_t, std::uint32_t)> evalf = [&](std::uint32_t id,
                                                                  std::uint32_t mask) -> bool {
      const Node n = a.node(id);
      if (n.tag == Tag::JointFormula) return !evalf(n.a, mask) && !evalf(n.b, mask);
      return (mask >> cls[id]) & 1u;
    };
    bool equivalent = true;
    for (std::uint32_t mask = 0; mask < (1u << reps.size()); ++mask) {
      if (evalf(x.id, mask) != evalf(y.id, mask)) {
        equivalent = false;
        break;
      }
    }
    if (equivalent) return Verdict::variant;
    // A sound refutation needs independent letters: only the quantifier-free
    // fully decided case qualifies.
    if (quantified || any_unknown) return Verdict::unknown;
    return Verdict::not_variant;
  }

  Verdict compare_letters(std::uint32_t x, std::uint32_t y) {
    const Node nx = a.node(x);
    const Node ny = a.node(y);
    if (nx.tag == Tag::Atom && ny.tag == Tag::Atom) return letter_formula(x, y);
    if (nx.tag == Tag::Universal && ny.tag == Tag::Universal) return letter_formula(x, y);
    // Atom vs quantifier: never identified, refutation handled by the caller.
    return Verdict::not_variant;
  }
};

}  // namespace

Verdict proposition_variant(Arena& a, FormulaId x, FormulaId y) {
  VariantCheck vc{a};
  return vc.prop(canonicalize(a, x), canonicalize(a, y));
}

Verdict variant(Arena& a, TermId x, TermId y) {
  if (!a.noemata(x.id).empty() || !a.noemata(y.id).empty())
    throw Error(Errc::not_cognomen, "variant is defined on cognomina");
  VariantCheck vc{a};
  return vc.term(x.id, y.id);
}

EnumPrefix enumerate_prefix(Arena& a, std::uint64_t K, std::uint32_t max_bits) {
  EnumPrefix out;
  if (K == 0) return out;
  if (max_bits > 24)
    throw Error(Errc::budget_exceeded, "enumerate: max_bits capped at 24");
  BigNat limit = BigNat(1) << max_bits;
  for (BigNat n = 1; n < limit; ++n) {
    syntax::Expr term_expr;
    try {
      auto syms = codec::formation_of(n);
      term_expr = syntax::parse_symbols(a, syms, syntax::Category::term).expr;
    } catch (const Error&) {
      continue;
    }
    TermId t = term_expr.as_term();
    if (!a.noemata(t.id).empty()) continue;
    bool is_new = true;
    bool unknowns = false;
    for (const auto& e : out.entries) {
      Verdict v = variant(a, t, e.representative);
      if (v == Verdict::variant) {
        is_new = false;
        break;
      }
      if (v == Verdict::unknown) unknowns = true;
    }
    if (!is_new) continue;
    out.entries.push_back({out.entries.size(), t, n, unknowns});
    if (out.entries.size() == K) return out;
  }
  throw Error(Errc::budget_exceeded,
              "enumerate: value budget exhausted before " + std::to_string(K) + " entries");
}

namespace {

std::optional<std::uint64_t> prefix_index(Arena& a, TermId t, const EnumPrefix& ctx) {
  for (const auto& e : ctx.entries) {
    if (variant(a, t, e.representative) == Verdict::variant) return e.index;
  }
  return std::nullopt;
}

}  // namespace

bool order_lt(Arena& a, TermId x, TermId y, const EnumPrefix& ctx) {
  auto ix = prefix_index(a, x, ctx);
  auto iy = prefix_index(a, y, ctx);
  if (!ix || !iy) throw Error(Errc::not_enumerated, "term not in the enumeration prefix");
  return *ix < *iy;
}

bool order_le(Arena& a, TermId x, TermId y, const EnumPrefix& ctx) {
  if (x == y) return true;  // structural identity, then ◂
  return order_lt(a, x, y, ctx);
}

}  // namespace libra::enumeration
