#include "libra/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace libra::syntax {

namespace {

bool is_term_tag(Tag t) {
  switch (t) {
    case Tag::Noema:
    case Tag::Alethizor:
    case Tag::Enumerator:
    case Tag::JointTerm:
    case Tag::Abstraction:
    case Tag::NumeralTerm:
      return true;
    default:
      return false;
  }
}

}  // namespace

Arena::Arena() = default;

std::uint32_t Arena::intern(Node n) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = interned_.find(n);
  if (it != interned_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(n);
  noemata_cache_.push_back(-1);
  const_cache_.push_back(-1);
  interned_.emplace(n, id);
  return id;
}

TermId Arena::noema(std::uint32_t index) { return TermId{intern({Tag::Noema, index, 0})}; }
TermId Arena::alethizor() { return TermId{intern({Tag::Alethizor, 0, 0})}; }
TermId Arena::enumerator() { return TermId{intern({Tag::Enumerator, 0, 0})}; }
TermId Arena::joint_term(TermId first, TermId second) {
  return TermId{intern({Tag::JointTerm, first.id, second.id})};
}
TermId Arena::abstraction(std::uint32_t binder, FormulaId body) {
  return TermId{intern({Tag::Abstraction, binder, body.id})};
}
FormulaId Arena::atom(TermId b_host, TermId a_member) {
  return FormulaId{intern({Tag::Atom, b_host.id, a_member.id})};
}
FormulaId Arena::joint_formula(FormulaId first, FormulaId second) {
  return FormulaId{intern({Tag::JointFormula, first.id, second.id})};
}
FormulaId Arena::universal(std::uint32_t binder, FormulaId body) {
  return FormulaId{intern({Tag::Universal, binder, body.id})};
}

const BigNat& Arena::numeral_source(std::uint32_t id) const {
  return numeral_sources_[nodes_[id].a];
}

std::optional<std::uint64_t> Arena::expanded_numeral_level(std::uint32_t id) const {
  auto it = level_of_.find(id);
  if (it == level_of_.end()) return std::nullopt;
  return it->second;
}

TermId Arena::expand_numeral(std::uint64_t n) {
  // Literal coding recursion: base {v0 | ∀v1((v0∈v1)→(v0∈v1))}; successor
  // {v0 | v0∈⌜k⌝ ∨ ∀v0((v1∈v0)→(⌜k⌝∈v0))}.
  while (numeral_levels_.size() <= n) {
    std::uint64_t k = numeral_levels_.size();
    TermId v0 = noema(0);
    TermId v1 = noema(1);
    auto imp = [&](FormulaId x, FormulaId y) {
      FormulaId nx = joint_formula(x, x);
      FormulaId half = joint_formula(nx, y);
      return joint_formula(half, half);
    };
    TermId level;
    if (k == 0) {
      FormulaId base_atom = atom(v1, v0);  // v0 ∈ v1
      level = abstraction(0, universal(1, imp(base_atom, base_atom)));
    } else {
      TermId prev = numeral_levels_[k - 1];
      FormulaId member = atom(prev, v0);                        // v0 ∈ ⌜k-1⌝
      FormulaId tri = universal(0, imp(atom(v0, v1),            // v1 ∈ v0
                                       atom(v0, prev)));        // ⌜k-1⌝ ∈ v0
      FormulaId half = joint_formula(member, tri);
      level = abstraction(0, joint_formula(half, half));
    }
    numeral_levels_.push_back(level);
    level_of_.emplace(level.id, k);
  }
  return numeral_levels_[n];
}

TermId Arena::numeral_term(const BigNat& n) {
  if (n <= kNumeralExpandMax) return expand_numeral(static_cast<std::uint64_t>(n));
  std::lock_guard<std::mutex> lock(mu_);
  auto it = numeral_slots_.find(n);
  std::uint32_t slot;
  if (it != numeral_slots_.end()) {
    slot = it->second;
  } else {
    slot = static_cast<std::uint32_t>(numeral_sources_.size());
    numeral_sources_.push_back(n);
    numeral_slots_.emplace(n, slot);
  }
  Node node{Tag::NumeralTerm, slot, 0};
  auto jt = interned_.find(node);
  if (jt != interned_.end()) return TermId{jt->second};
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);
  noemata_cache_.push_back(-1);
  const_cache_.push_back(-1);
  interned_.emplace(node, id);
  return TermId{id};
}

std::int32_t Arena::noemata_locked(std::uint32_t id) {
  if (noemata_cache_[id] >= 0) return noemata_cache_[id];
  // Iterative post-order over the shared DAG.
  std::vector<std::uint32_t> stack{id};
  while (!stack.empty()) {
    std::uint32_t cur = stack.back();
    if (noemata_cache_[cur] >= 0) {
      stack.pop_back();
      continue;
    }
    const Node& nd = nodes_[cur];
    auto ready = [&](std::uint32_t child) {
      if (noemata_cache_[child] < 0) {
        stack.push_back(child);
        return false;
      }
      return true;
    };
    std::vector<std::uint32_t> out;
    bool done = true;
    switch (nd.tag) {
      case Tag::Noema:
        out = {nd.a};
        break;
      case Tag::Alethizor:
      case Tag::Enumerator:
        break;
      case Tag::NumeralTerm:
        // Literal successor codes carry a free v1; the base is closed.
        if (numeral_sources_[nd.a] >= 1) out = {1};
        break;
      case Tag::JointTerm:
      case Tag::Atom:
      case Tag::JointFormula: {
        done = ready(nd.a) & ready(nd.b);
        if (done) {
          const auto& l = set_pool_[noemata_cache_[nd.a]];
          const auto& r = set_pool_[noemata_cache_[nd.b]];
          std::set_union(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(out));
        }
        break;
      }
      case Tag::Abstraction:
      case Tag::Universal: {
        done = ready(nd.b);
        if (done) {
          const auto& body = set_pool_[noemata_cache_[nd.b]];
          for (std::uint32_t v : body)
            if (v != nd.a) out.push_back(v);
        }
        break;
      }
    }
    if (!done) continue;
    auto it = set_pool_index_.find(out);
    std::int32_t set_id;
    if (it != set_pool_index_.end()) {
      set_id = it->second;
    } else {
      set_id = static_cast<std::int32_t>(set_pool_.size());
      set_pool_.push_back(out);
      set_pool_index_.emplace(std::move(out), set_id);
    }
    noemata_cache_[cur] = set_id;
    stack.pop_back();
  }
  return noemata_cache_[id];
}

const std::vector<std::uint32_t>& Arena::noemata(std::uint32_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  return set_pool_[noemata_locked(id)];
}

std::int8_t Arena::consts_locked(std::uint32_t id) {
  if (const_cache_[id] >= 0) return const_cache_[id];
  std::vector<std::uint32_t> stack{id};
  while (!stack.empty()) {
    std::uint32_t cur = stack.back();
    if (const_cache_[cur] >= 0) {
      stack.pop_back();
      continue;
    }
    const Node& nd = nodes_[cur];
    std::int8_t bits = 0;
    bool done = true;
    switch (nd.tag) {
      case Tag::Alethizor:
        bits = 1;
        break;
      case Tag::Enumerator:
        bits = 2;
        break;
      case Tag::Noema:
      case Tag::NumeralTerm:
        break;
      case Tag::JointTerm:
      case Tag::Atom:
      case Tag::JointFormula:
        if (const_cache_[nd.a] < 0) { stack.push_back(nd.a); done = false; }
        if (const_cache_[nd.b] < 0) { stack.push_back(nd.b); done = false; }
        if (done) bits = const_cache_[nd.a] | const_cache_[nd.b];
        break;
      case Tag::Abstraction:
      case Tag::Universal:
        if (const_cache_[nd.b] < 0) { stack.push_back(nd.b); done = false; }
        if (done) bits = const_cache_[nd.b];
        break;
    }
    if (!done) continue;
    const_cache_[cur] = bits;
    stack.pop_back();
  }
  return const_cache_[id];
}

bool Arena::contains_alethizor(std::uint32_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  return consts_locked(id) & 1;
}
bool Arena::contains_enumerator(std::uint32_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  return consts_locked(id) & 2;
}

// ---------------------------------------------------------------------------
// Flattening and lengths

namespace {

// Capped symbol-length of ⌜n⌝: S(0)=21, S(n+1)=41+6·S(n).
std::optional<BigNat> numeral_symbols_capped(const BigNat& n, const BigNat& cap) {
  BigNat s = 21;
  for (BigNat k = 0; k < n; ++k) {
    s = 41 + 6 * s;
    if (s > cap) return std::nullopt;
  }
  if (s > cap) return std::nullopt;
  return s;
}

// Capped bit-length of ⌜n⌝: L(0)=109, L(n+1)=202+6·L(n).
std::optional<BigNat> numeral_bits_capped(const BigNat& n, const BigNat& cap) {
  BigNat s = 109;
  for (BigNat k = 0; k < n; ++k) {
    s = 202 + 6 * s;
    if (s > cap) return std::nullopt;
  }
  if (s > cap) return std::nullopt;
  return s;
}

}  // namespace

std::vector<std::uint64_t> flatten_symbols(Arena& a, Expr e, std::uint64_t max_symbols) {
  std::vector<std::uint64_t> out;
  std::vector<std::uint32_t> stack{e.id};
  while (!stack.empty()) {
    std::uint32_t id = stack.back();
    stack.pop_back();
    const Node nd = a.node(id);
    if (out.size() > max_symbols)
      throw Error(Errc::budget_exceeded, "flatten: symbol budget exceeded");
    switch (nd.tag) {
      case Tag::Noema:
        out.push_back(static_cast<std::uint64_t>(nd.a) + 5);
        break;
      case Tag::Alethizor:
        out.push_back(3);
        break;
      case Tag::Enumerator:
        out.push_back(4);
        break;
      case Tag::NumeralTerm:
        throw Error(Errc::budget_exceeded, "flatten: numeral leaf too large to expand");
      case Tag::JointTerm:
      case Tag::JointFormula:
        out.push_back(2);
        stack.push_back(nd.b);
        stack.push_back(nd.a);
        break;
      case Tag::Atom:
        stack.push_back(nd.b);
        stack.push_back(nd.a);
        break;
      case Tag::Abstraction:
        out.push_back(0);
        out.push_back(static_cast<std::uint64_t>(nd.a) + 5);
        stack.push_back(nd.b);
        break;
      case Tag::Universal:
        out.push_back(1);
        out.push_back(static_cast<std::uint64_t>(nd.a) + 5);
        stack.push_back(nd.b);
        break;
    }
  }
  if (out.size() > max_symbols)
    throw Error(Errc::budget_exceeded, "flatten: symbol budget exceeded");
  return out;
}

SymLen expr_bit_length_sym(Arena& a, Expr e) {
  std::unordered_map<std::uint32_t, SymLen> memo;
  std::function<const SymLen&(std::uint32_t)> go = [&](std::uint32_t id) -> const SymLen& {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node nd = a.node(id);
    SymLen r;
    switch (nd.tag) {
      case Tag::Noema:
        r.c = BigNat(nd.a) + 6;
        break;
      case Tag::Alethizor:
        r.c = 4;
        break;
      case Tag::Enumerator:
        r.c = 5;
        break;
      case Tag::NumeralTerm:
        r.terms[a.numeral_source(id)] = 1;
        break;
      case Tag::JointTerm:
      case Tag::JointFormula: {
        const SymLen& l = go(nd.a);
        const SymLen& rr = go(nd.b);
        r.c = 3 + l.c + rr.c;
        r.terms = l.terms;
        for (const auto& [k, v] : rr.terms) r.terms[k] += v;
        break;
      }
      case Tag::Atom: {
        const SymLen& l = go(nd.a);
        const SymLen& rr = go(nd.b);
        r.c = l.c + rr.c;
        r.terms = l.terms;
        for (const auto& [k, v] : rr.terms) r.terms[k] += v;
        break;
      }
      case Tag::Abstraction:
      case Tag::Universal: {
        const SymLen& body = go(nd.b);
        r.c = (nd.tag == Tag::Abstraction ? 1 : 2) + (BigNat(nd.a) + 6) + body.c;
        r.terms = body.terms;
        break;
      }
    }
    return memo.emplace(id, std::move(r)).first->second;
  };
  return go(e.id);
}

std::optional<BigNat> expr_bit_length_capped(Arena& a, Expr e, const BigNat& cap) {
  SymLen s = expr_bit_length_sym(a, e);
  BigNat total = s.c;
  if (total > cap) return std::nullopt;
  for (const auto& [src, coeff] : s.terms) {
    BigNat per = 0;
    auto bits = numeral_bits_capped(src, cap);
    if (!bits) return std::nullopt;
    per = *bits;
    total += per * coeff;
    if (total > cap) return std::nullopt;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Austere / bare parsing

namespace {

std::vector<std::uint64_t> tokenize_austere(std::string_view text) {
  std::vector<std::uint64_t> syms;
  if (text.empty()) throw Error(Errc::malformed_formation, "empty formation");
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '|') {
      std::uint64_t dots = 0;
      ++i;
      while (i < text.size() && text[i] == '.') {
        ++dots;
        ++i;
      }
      syms.push_back(dots);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      throw Error(Errc::malformed_formation,
                  std::string("austere text must use only '|' and '.', got '") + c + "'");
    }
  }
  if (syms.empty()) throw Error(Errc::malformed_formation, "no symbols");
  return syms;
}

std::vector<std::uint64_t> tokenize_bare(std::string_view text) {
  std::vector<std::uint64_t> syms;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c != '|') throw Error(Errc::malformed_formation, "bare token must start with '|_'");
    ++i;
    if (i >= text.size() || text[i] != '_')
      throw Error(Errc::malformed_formation, "bare token must start with '|_'");
    ++i;
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
      throw Error(Errc::malformed_formation, "bare token needs a decimal index");
    std::uint64_t k = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      k = k * 10 + static_cast<std::uint64_t>(text[i] - '0');
      if (k > (1ull << 40)) throw Error(Errc::malformed_formation, "symbol index too large");
      ++i;
    }
    syms.push_back(k);
  }
  if (syms.empty()) throw Error(Errc::malformed_formation, "no symbols");
  return syms;
}

struct PolishParser {
  Arena& a;
  const std::vector<std::uint64_t>& syms;
  using Hits = std::vector<std::pair<std::size_t, std::uint32_t>>;
  std::unordered_map<std::size_t, Hits> tmemo, fmemo;

  std::uint32_t noema_index(std::uint64_t k) {
    if (k - 5 > 0xffffffffull) throw Error(Errc::malformed_formation, "noema index too large");
    return static_cast<std::uint32_t>(k - 5);
  }

  const Hits& terms_at(std::size_t pos) {
    auto it = tmemo.find(pos);
    if (it != tmemo.end()) return it->second;
    Hits& out = tmemo[pos];
    if (pos >= syms.size()) return out;
    std::uint64_t k = syms[pos];
    if (k == 0) {
      if (pos + 1 < syms.size() && syms[pos + 1] >= 5) {
        std::uint32_t binder = noema_index(syms[pos + 1]);
        for (auto [end, f] : formulas_at(pos + 2))
          out.emplace_back(end, a.abstraction(binder, FormulaId{f}).id);
      }
    } else if (k == 2) {
      for (auto [mid, t1] : terms_at(pos + 1))
        for (auto [end, t2] : terms_at(mid))
          out.emplace_back(end, a.joint_term(TermId{t1}, TermId{t2}).id);
    } else if (k == 3) {
      out.emplace_back(pos + 1, a.alethizor().id);
    } else if (k == 4) {
      out.emplace_back(pos + 1, a.enumerator().id);
    } else if (k >= 5) {
      out.emplace_back(pos + 1, a.noema(noema_index(k)).id);
    }
    dedupe(out);
    return out;
  }

  const Hits& formulas_at(std::size_t pos) {
    auto it = fmemo.find(pos);
    if (it != fmemo.end()) return it->second;
    Hits& out = fmemo[pos];
    if (pos >= syms.size()) return out;
    std::uint64_t k = syms[pos];
    if (k == 2) {
      for (auto [mid, f1] : formulas_at(pos + 1))
        for (auto [end, f2] : formulas_at(mid))
          out.emplace_back(end, a.joint_formula(FormulaId{f1}, FormulaId{f2}).id);
    } else if (k == 1) {
      if (pos + 1 < syms.size() && syms[pos + 1] >= 5) {
        std::uint32_t binder = noema_index(syms[pos + 1]);
        for (auto [end, f] : formulas_at(pos + 2))
          out.emplace_back(end, a.universal(binder, FormulaId{f}).id);
      }
    }
    // Atomic formula b⌢a.
    for (auto [mid, b] : terms_at(pos))
      for (auto [end, am] : terms_at(mid))
        out.emplace_back(end, a.atom(TermId{b}, TermId{am}).id);
    dedupe(out);
    return out;
  }

  static void dedupe(Hits& h) {
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
  }

  std::vector<std::uint32_t> whole(Category cat) {
    std::vector<std::uint32_t> full;
    const Hits& hits = (cat == Category::term) ? terms_at(0) : formulas_at(0);
    for (auto [end, id] : hits)
      if (end == syms.size()) full.push_back(id);
    return full;
  }
};

ParseResult parse_symbols_impl(Arena& a, const std::vector<std::uint64_t>& syms, Category cat) {
  PolishParser p{a, syms};
  auto one = [&](Category c) -> std::optional<Expr> {
    auto full = p.whole(c);
    if (full.empty()) return std::nullopt;
    if (full.size() > 1)
      throw Error(Errc::ambiguous, "string admits more than one whole-string parse in category");
    return c == Category::term ? Expr::term(TermId{full[0]}) : Expr::formula(FormulaId{full[0]});
  };
  if (cat == Category::term || cat == Category::formula) {
    auto r = one(cat);
    if (!r)
      throw Error(Errc::not_in_category,
                  cat == Category::term ? "not a term" : "not a formula");
    return {*r, cat};
  }
  auto t = one(Category::term);
  auto f = one(Category::formula);
  if (t && f) throw AmbiguousError(*t, *f, "string parses as both a term and a formula");
  if (t) return {*t, Category::term};
  if (f) return {*f, Category::formula};
  throw Error(Errc::not_in_category, "neither a term nor a formula");
}

}  // namespace

ParseResult parse(Arena& a, std::string_view text, Category cat) {
  bool bare = text.find('_') != std::string_view::npos;
  auto syms = bare ? tokenize_bare(text) : tokenize_austere(text);
  return parse_symbols_impl(a, syms, cat);
}

ParseResult parse_symbols(Arena& a, const std::vector<std::uint64_t>& syms, Category cat) {
  return parse_symbols_impl(a, syms, cat);
}

// ---------------------------------------------------------------------------
// Sugar builders and matchers

FormulaId f_not(Arena& a, FormulaId x) { return a.joint_formula(x, x); }
FormulaId f_or(Arena& a, FormulaId x, FormulaId y) {
  FormulaId h = a.joint_formula(x, y);
  return a.joint_formula(h, h);
}
FormulaId f_and(Arena& a, FormulaId x, FormulaId y) {
  return a.joint_formula(a.joint_formula(x, x), a.joint_formula(y, y));
}
FormulaId f_imp(Arena& a, FormulaId x, FormulaId y) {
  FormulaId h = a.joint_formula(a.joint_formula(x, x), y);
  return a.joint_formula(h, h);
}
FormulaId f_iff(Arena& a, FormulaId x, FormulaId y) {
  return f_and(a, f_imp(a, x, y), f_imp(a, y, x));
}
FormulaId f_exists(Arena& a, std::uint32_t binder, FormulaId body) {
  return f_not(a, a.universal(binder, f_not(a, body)));
}
FormulaId f_in(Arena& a, TermId member, TermId host) { return a.atom(host, member); }

std::uint32_t d19_binder(Arena& a, FormulaId body) {
  const auto& ns = a.noemata(body.id);
  std::uint32_t y = 0;
  while (y < ns.size() && ns[y] == y) ++y;
  return y;
}

FormulaId f_tt(Arena& a, FormulaId body) {
  std::uint32_t y = d19_binder(a, body);
  return f_exists(a, y, f_in(a, a.noema(y), a.abstraction(y, body)));
}

TermId t_comp(Arena& a, TermId x) { return a.joint_term(x, x); }
TermId t_union(Arena& a, TermId x, TermId y) {
  TermId h = a.joint_term(x, y);
  return a.joint_term(h, h);
}
TermId t_inter(Arena& a, TermId x, TermId y) {
  return a.joint_term(t_comp(a, x), t_comp(a, y));
}
TermId t_minus(Arena& a, TermId x, TermId y) { return t_inter(a, x, t_comp(a, y)); }

std::optional<FormulaId> match_not(Arena& a, FormulaId f) {
  const Node n = a.node(f);
  if (n.tag == Tag::JointFormula && n.a == n.b) return FormulaId{n.a};
  return std::nullopt;
}
std::optional<std::pair<FormulaId, FormulaId>> match_or(Arena& a, FormulaId f) {
  const Node n = a.node(f);
  if (n.tag != Tag::JointFormula || n.a != n.b) return std::nullopt;
  const Node h = a.node(FormulaId{n.a});
  if (h.tag != Tag::JointFormula) return std::nullopt;
  return std::make_pair(FormulaId{h.a}, FormulaId{h.b});
}
std::optional<std::pair<FormulaId, FormulaId>> match_and(Arena& a, FormulaId f) {
  const Node n = a.node(f);
  if (n.tag != Tag::JointFormula) return std::nullopt;
  const Node l = a.node(FormulaId{n.a});
  const Node r = a.node(FormulaId{n.b});
  if (l.tag != Tag::JointFormula || l.a != l.b) return std::nullopt;
  if (r.tag != Tag::JointFormula || r.a != r.b) return std::nullopt;
  return std::make_pair(FormulaId{l.a}, FormulaId{r.a});
}
std::optional<std::pair<FormulaId, FormulaId>> match_imp(Arena& a, FormulaId f) {
  const Node n = a.node(f);
  if (n.tag != Tag::JointFormula || n.a != n.b) return std::nullopt;
  const Node h = a.node(FormulaId{n.a});
  if (h.tag != Tag::JointFormula) return std::nullopt;
  const Node l = a.node(FormulaId{h.a});
  if (l.tag != Tag::JointFormula || l.a != l.b) return std::nullopt;
  return std::make_pair(FormulaId{l.a}, FormulaId{h.b});
}
std::optional<std::pair<FormulaId, FormulaId>> match_iff(Arena& a, FormulaId f) {
  auto both = match_and(a, f);
  if (!both) return std::nullopt;
  auto fwd = match_imp(a, both->first);
  auto bwd = match_imp(a, both->second);
  if (!fwd || !bwd) return std::nullopt;
  if (fwd->first == bwd->second && fwd->second == bwd->first) return fwd;
  return std::nullopt;
}
std::optional<std::pair<std::uint32_t, FormulaId>> match_exists(Arena& a, FormulaId f) {
  auto neg = match_not(a, f);
  if (!neg) return std::nullopt;
  const Node u = a.node(*neg);
  if (u.tag != Tag::Universal) return std::nullopt;
  auto inner = match_not(a, FormulaId{u.b});
  if (!inner) return std::nullopt;
  return std::make_pair(u.a, *inner);
}
std::optional<FormulaId> match_tt(Arena& a, FormulaId f) {
  auto ex = match_exists(a, f);
  if (!ex) return std::nullopt;
  const Node atom_node = a.node(ex->second);
  if (atom_node.tag != Tag::Atom) return std::nullopt;
  const Node host = a.node(TermId{atom_node.a});
  const Node member = a.node(TermId{atom_node.b});
  if (member.tag != Tag::Noema || member.a != ex->first) return std::nullopt;
  if (host.tag != Tag::Abstraction || host.a != ex->first) return std::nullopt;
  FormulaId body{host.b};
  if (d19_binder(a, body) != ex->first) return std::nullopt;
  return body;
}
std::optional<TermId> match_comp(Arena& a, TermId t) {
  const Node n = a.node(t);
  if (n.tag == Tag::JointTerm && n.a == n.b) return TermId{n.a};
  return std::nullopt;
}
std::optional<std::pair<TermId, TermId>> match_union(Arena& a, TermId t) {
  const Node n = a.node(t);
  if (n.tag != Tag::JointTerm || n.a != n.b) return std::nullopt;
  const Node h = a.node(TermId{n.a});
  if (h.tag != Tag::JointTerm) return std::nullopt;
  return std::make_pair(TermId{h.a}, TermId{h.b});
}
std::optional<std::pair<TermId, TermId>> match_inter(Arena& a, TermId t) {
  const Node n = a.node(t);
  if (n.tag != Tag::JointTerm) return std::nullopt;
  auto l = match_comp(a, TermId{n.a});
  auto r = match_comp(a, TermId{n.b});
  if (!l || !r) return std::nullopt;
  return std::make_pair(*l, *r);
}
std::optional<std::pair<TermId, TermId>> match_minus(Arena& a, TermId t) {
  auto in = match_inter(a, t);
  if (!in) return std::nullopt;
  auto c = match_comp(a, in->second);
  if (!c) return std::nullopt;
  return std::make_pair(in->first, *c);
}

FormulaId identity_formula(Arena& a, TermId x, TermId y) {
  const auto& nx = a.noemata(x.id);
  const auto& ny = a.noemata(y.id);
  std::uint32_t u = 0;
  while (std::binary_search(nx.begin(), nx.end(), u) ||
         std::binary_search(ny.begin(), ny.end(), u))
    ++u;
  TermId un = a.noema(u);
  return a.universal(u, f_imp(a, f_in(a, x, un), f_in(a, y, un)));
}

TermId pair_term(Arena& a, TermId x, TermId y) {
  const auto& nx = a.noemata(x.id);
  const auto& ny = a.noemata(y.id);
  std::uint32_t z = 0;
  while (std::binary_search(nx.begin(), nx.end(), z) ||
         std::binary_search(ny.begin(), ny.end(), z))
    ++z;
  TermId zn = a.noema(z);
  TermId singleton = a.abstraction(z, identity_formula(a, zn, x));
  TermId doubleton =
      a.abstraction(z, f_or(a, identity_formula(a, zn, x), identity_formula(a, zn, y)));
  std::uint32_t w = z;  // inner sets are closed in their binder, reuse is safe
  TermId wn = a.noema(w);
  return a.abstraction(
      w, f_or(a, identity_formula(a, wn, singleton), identity_formula(a, wn, doubleton)));
}

// ---------------------------------------------------------------------------
// Substitution and substitutability

namespace {

struct Subst {
  Arena& a;
  TermId repl;
  std::uint32_t u;
  std::unordered_map<std::uint32_t, std::uint32_t> memo;

  std::uint32_t go(std::uint32_t id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node n = a.node(id);
    std::uint32_t r = id;
    switch (n.tag) {
      case Tag::Noema:
        r = (n.a == u) ? repl.id : id;
        break;
      case Tag::Alethizor:
      case Tag::Enumerator:
        break;
      case Tag::NumeralTerm: {
        const auto& ns = a.noemata(id);
        if (std::binary_search(ns.begin(), ns.end(), u))
          throw Error(Errc::budget_exceeded,
                      "substitution would expand an opaque numeral leaf");
        break;
      }
      case Tag::JointTerm:
        r = a.joint_term(TermId{go(n.a)}, TermId{go(n.b)}).id;
        break;
      case Tag::Atom:
        r = a.atom(TermId{go(n.a)}, TermId{go(n.b)}).id;
        break;
      case Tag::JointFormula:
        r = a.joint_formula(FormulaId{go(n.a)}, FormulaId{go(n.b)}).id;
        break;
      case Tag::Abstraction:
        r = (n.a == u) ? id : a.abstraction(n.a, FormulaId{go(n.b)}).id;
        break;
      case Tag::Universal:
        r = (n.a == u) ? id : a.universal(n.a, FormulaId{go(n.b)}).id;
        break;
    }
    memo.emplace(id, r);
    return r;
  }
};

}  // namespace

Expr substitute(Arena& a, TermId term, std::uint32_t u, Expr e) {
  Subst s{a, term, u, {}};
  return Expr{s.go(e.id), e.is_term};
}
TermId substitute_term(Arena& a, TermId term, std::uint32_t u, TermId e) {
  return substitute(a, term, u, Expr::term(e)).as_term();
}
FormulaId substitute_formula(Arena& a, TermId term, std::uint32_t u, FormulaId e) {
  return substitute(a, term, u, Expr::formula(e)).as_formula();
}

bool substitutable(Arena& a, TermId term, std::uint32_t u, Expr e) {
  const auto& na = a.noemata(term.id);
  std::unordered_map<std::uint32_t, bool> memo;
  std::function<bool(std::uint32_t)> go = [&](std::uint32_t id) -> bool {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node n = a.node(id);
    bool r = true;
    switch (n.tag) {
      case Tag::Noema:
      case Tag::Alethizor:
      case Tag::Enumerator:
        break;
      case Tag::NumeralTerm: {
        const auto& ns = a.noemata(id);
        r = !std::binary_search(ns.begin(), ns.end(), u);
        break;
      }
      case Tag::JointTerm:
      case Tag::Atom:
      case Tag::JointFormula:
        r = go(n.a) && go(n.b);
        break;
      case Tag::Abstraction:
      case Tag::Universal: {
        // Literal reading: y ∉ ℵ(a), or (u ∉ ℵ(body) and recurse).
        bool binder_in_a = std::binary_search(na.begin(), na.end(), n.a);
        if (!binder_in_a) {
          r = true;
        } else {
          const auto& nb = a.noemata(n.b);
          r = !std::binary_search(nb.begin(), nb.end(), u) && go(n.b);
        }
        break;
      }
    }
    memo.emplace(id, r);
    return r;
  };
  return go(e.id);
}

std::uint64_t count_noema_occurrences(Arena& a, Expr e, std::uint32_t u) {
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  std::function<std::uint64_t(std::uint32_t)> go = [&](std::uint32_t id) -> std::uint64_t {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node n = a.node(id);
    std::uint64_t r = 0;
    switch (n.tag) {
      case Tag::Noema:
        r = (n.a == u) ? 1 : 0;
        break;
      case Tag::Alethizor:
      case Tag::Enumerator:
      case Tag::NumeralTerm:
        break;
      case Tag::JointTerm:
      case Tag::Atom:
      case Tag::JointFormula:
        r = go(n.a) + go(n.b);
        break;
      case Tag::Abstraction:
      case Tag::Universal:
        r = (n.a == u) ? 0 : go(n.b);
        break;
    }
    memo.emplace(id, r);
    return r;
  };
  return go(e.id);
}

// ---------------------------------------------------------------------------
// Classification and caliber

TermClass classify_term(Arena& a, TermId t) {
  TermClass c;
  const Node n = a.node(t);
  c.praenomen = n.tag == Tag::Noema || n.tag == Tag::Alethizor || n.tag == Tag::Enumerator;
  c.cognomen = a.noemata(t.id).empty();
  c.pronomen = c.cognomen && !a.contains_alethizor(t.id) && !a.contains_enumerator(t.id);
  return c;
}

std::uint64_t caliber(Arena& a, TermId t) {
  if (!a.noemata(t.id).empty())
    throw Error(Errc::not_cognomen, "caliber is defined on cognomina only");
  std::function<std::uint64_t(std::uint32_t)> go = [&](std::uint32_t id) -> std::uint64_t {
    const Node n = a.node(id);
    switch (n.tag) {
      case Tag::Alethizor:
      case Tag::Enumerator:
      case Tag::Abstraction:
      case Tag::NumeralTerm:
        return 0;
      case Tag::JointTerm:
        return 1 + std::max(go(n.a), go(n.b));
      default:
        throw Error(Errc::not_cognomen, "caliber is defined on cognomina only");
    }
  };
  return go(t.id);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void render_symbols(const std::vector<std::uint64_t>& syms, Form form, std::string& out) {
  for (std::uint64_t k : syms) {
    if (form == Form::austere) {
      out.push_back('|');
      out.append(static_cast<std::size_t>(k), '.');
    } else {
      out += "|_" + std::to_string(k);
    }
  }
}

struct PresentablePrinter {
  Arena& a;
  std::string out;

  void term(TermId t) {
    const Node n = a.node(t);
    switch (n.tag) {
      case Tag::Noema:
        out += "v" + std::to_string(n.a);
        return;
      case Tag::Alethizor:
        out += "T";
        return;
      case Tag::Enumerator:
        out += "E";
        return;
      case Tag::NumeralTerm:
        out += "code(" + a.numeral_source(t.id).str() + ")";
        return;
      case Tag::Abstraction: {
        if (auto lvl = a.expanded_numeral_level(t.id); lvl && *lvl > 2) {
          out += "code(" + std::to_string(*lvl) + ")";
          return;
        }
        out += "{v" + std::to_string(n.a) + " | ";
        formula(FormulaId{n.b}, 0);
        out += "}";
        return;
      }
      case Tag::JointTerm: {
        if (auto mm = match_minus(a, t)) {
          out += "minus(";
          term(mm->first);
          out += ", ";
          term(mm->second);
          out += ")";
          return;
        }
        if (auto mi = match_inter(a, t)) {
          out += "inter(";
          term(mi->first);
          out += ", ";
          term(mi->second);
          out += ")";
          return;
        }
        if (auto mu = match_union(a, t)) {
          out += "union(";
          term(mu->first);
          out += ", ";
          term(mu->second);
          out += ")";
          return;
        }
        if (auto mc = match_comp(a, t)) {
          out += "comp(";
          term(*mc);
          out += ")";
          return;
        }
        out += "nor(";
        term(TermId{n.a});
        out += ", ";
        term(TermId{n.b});
        out += ")";
        return;
      }
      default:
        return;
    }
  }

  // Levels: <-> 1, -> 2, or 3, and 4, prefix 5, function-style 6; "a in b"
  // renders at level 1 so it is parenthesized under any connective.
  void formula(FormulaId f, int need) {
    if (auto body = match_tt(a, f)) {
      out += "TT(";
      formula(*body, 0);
      out += ")";
      return;
    }
    if (auto ex = match_exists(a, f)) {
      wrap(5, need, [&] {
        out += "exists v" + std::to_string(ex->first) + ". ";
        formula(ex->second, 5);
      });
      return;
    }
    if (auto iff = match_iff(a, f)) {
      wrap(1, need, [&] {
        formula(iff->first, 1);
        out += " <-> ";
        formula(iff->second, 2);
      });
      return;
    }
    if (auto imp = match_imp(a, f)) {
      wrap(2, need, [&] {
        formula(imp->first, 3);
        out += " -> ";
        formula(imp->second, 2);
      });
      return;
    }
    if (auto orr = match_or(a, f)) {
      wrap(3, need, [&] {
        formula(orr->first, 3);
        out += " or ";
        formula(orr->second, 4);
      });
      return;
    }
    if (auto andd = match_and(a, f)) {
      wrap(4, need, [&] {
        formula(andd->first, 4);
        out += " and ";
        formula(andd->second, 5);
      });
      return;
    }
    if (auto neg = match_not(a, f)) {
      wrap(5, need, [&] {
        out += "not ";
        formula(*neg, 6);
      });
      return;
    }
    const Node n = a.node(f);
    if (n.tag == Tag::Universal) {
      wrap(5, need, [&] {
        out += "all v" + std::to_string(n.a) + ". ";
        formula(FormulaId{n.b}, 5);
      });
      return;
    }
    if (n.tag == Tag::Atom) {
      wrap(1, need, [&] {
        term(TermId{n.b});
        out += " in ";
        term(TermId{n.a});
      });
      return;
    }
    // Bare joint without sugar shape.
    out += "nor(";
    formula(FormulaId{n.a}, 0);
    out += ", ";
    formula(FormulaId{n.b}, 0);
    out += ")";
  }

  template <class Fn>
  void wrap(int level, int need, Fn&& body) {
    bool paren = level < need;
    if (paren) out += "(";
    body();
    if (paren) out += ")";
  }
};

}  // namespace

std::string print(Arena& a, Expr e, Form form, std::uint64_t max_bits) {
  if (form == Form::presentable) {
    PresentablePrinter p{a};
    if (e.is_term)
      p.term(e.as_term());
    else
      p.formula(e.as_formula(), 0);
    return std::move(p.out);
  }
  if (!expr_bit_length_capped(a, e, BigNat(max_bits)))
    throw Error(Errc::budget_exceeded, "print: formation exceeds bit budget");
  auto syms = flatten_symbols(a, e, max_bits);
  std::string out;
  render_symbols(syms, form, out);
  return out;
}

// ---------------------------------------------------------------------------
// Presentable parsing

namespace {

struct PToken {
  enum Kind { Ident, Var, Number, LParen, RParen, LBrace, RBrace, Bar, Comma, Dot, Arrow, Iff, End } kind;
  std::string text;
  std::uint64_t num = 0;
};

std::vector<PToken> ptokenize(std::string_view s) {
  std::vector<PToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') { out.push_back({PToken::LParen, "("}); ++i; continue; }
    if (c == ')') { out.push_back({PToken::RParen, ")"}); ++i; continue; }
    if (c == '{') { out.push_back({PToken::LBrace, "{"}); ++i; continue; }
    if (c == '}') { out.push_back({PToken::RBrace, "}"}); ++i; continue; }
    if (c == '|') { out.push_back({PToken::Bar, "|"}); ++i; continue; }
    if (c == ',') { out.push_back({PToken::Comma, ","}); ++i; continue; }
    if (c == '.') { out.push_back({PToken::Dot, "."}); ++i; continue; }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({PToken::Arrow, "->"});
      i += 2;
      continue;
    }
    if (c == '<' && i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
      out.push_back({PToken::Iff, "<->"});
      i += 3;
      continue;
    }
    if (c == 'v' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      std::size_t j = i + 1;
      std::uint64_t k = 0;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
        k = k * 10 + static_cast<std::uint64_t>(s[j] - '0');
        if (k > 0xffffffffull) throw Error(Errc::malformed_formation, "noema index too large");
        ++j;
      }
      out.push_back({PToken::Var, std::string(s.substr(i, j - i)), k});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({PToken::Number, std::string(s.substr(i, j - i))});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({PToken::Ident, std::string(s.substr(i, j - i))});
      i = j;
      continue;
    }
    throw Error(Errc::malformed_formation, std::string("unexpected character '") + c + "'");
  }
  out.push_back({PToken::End, ""});
  return out;
}

struct PParser {
  Arena& a;
  std::vector<PToken> toks;
  std::size_t pos = 0;

  const PToken& peek() const { return toks[pos]; }
  bool at_ident(const char* s) const {
    return peek().kind == PToken::Ident && peek().text == s;
  }
  void expect(PToken::Kind k, const char* what) {
    if (peek().kind != k)
      throw Error(Errc::malformed_formation, std::string("expected ") + what);
    ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(Errc::malformed_formation, msg + " near token " + std::to_string(pos));
  }

  TermId parse_term() {
    const PToken& t = peek();
    if (t.kind == PToken::Ident) {
      if (t.text == "T") { ++pos; return a.alethizor(); }
      if (t.text == "E") { ++pos; return a.enumerator(); }
      if (t.text == "nor") return call2t([&](TermId x, TermId y) { return a.joint_term(x, y); });
      if (t.text == "comp") return call1t([&](TermId x) { return t_comp(a, x); });
      if (t.text == "union") return call2t([&](TermId x, TermId y) { return t_union(a, x, y); });
      if (t.text == "inter") return call2t([&](TermId x, TermId y) { return t_inter(a, x, y); });
      if (t.text == "minus") return call2t([&](TermId x, TermId y) { return t_minus(a, x, y); });
      if (t.text == "pair") return call2t([&](TermId x, TermId y) { return pair_term(a, x, y); });
      if (t.text == "code") {
        ++pos;
        expect(PToken::LParen, "'('");
        if (peek().kind != PToken::Number) fail("code() needs a number");
        BigNat n(peek().text);
        ++pos;
        expect(PToken::RParen, "')'");
        return a.numeral_term(n);
      }
      fail("unknown term '" + t.text + "'");
    }
    if (t.kind == PToken::Var) {
      ++pos;
      return a.noema(static_cast<std::uint32_t>(t.num));
    }
    if (t.kind == PToken::LBrace) {
      ++pos;
      if (peek().kind != PToken::Var) fail("'{' needs a binder noema");
      std::uint32_t binder = static_cast<std::uint32_t>(peek().num);
      ++pos;
      expect(PToken::Bar, "'|'");
      FormulaId body = parse_formula();
      expect(PToken::RBrace, "'}'");
      return a.abstraction(binder, body);
    }
    if (t.kind == PToken::LParen) {
      ++pos;
      TermId inner = parse_term();
      expect(PToken::RParen, "')'");
      return inner;
    }
    fail("expected a term");
  }

  template <class Fn>
  TermId call1t(Fn&& f) {
    ++pos;
    expect(PToken::LParen, "'('");
    TermId x = parse_term();
    expect(PToken::RParen, "')'");
    return f(x);
  }
  template <class Fn>
  TermId call2t(Fn&& f) {
    ++pos;
    expect(PToken::LParen, "'('");
    TermId x = parse_term();
    expect(PToken::Comma, "','");
    TermId y = parse_term();
    expect(PToken::RParen, "')'");
    return f(x, y);
  }

  FormulaId parse_formula() { return parse_iff(); }

  FormulaId parse_iff() {
    FormulaId l = parse_imp();
    while (peek().kind == PToken::Iff) {
      ++pos;
      FormulaId r = parse_imp();
      l = f_iff(a, l, r);
    }
    return l;
  }
  FormulaId parse_imp() {
    FormulaId l = parse_or();
    if (peek().kind == PToken::Arrow) {
      ++pos;
      FormulaId r = parse_imp();
      return f_imp(a, l, r);
    }
    return l;
  }
  FormulaId parse_or() {
    FormulaId l = parse_and();
    while (at_ident("or")) {
      ++pos;
      l = f_or(a, l, parse_and());
    }
    return l;
  }
  FormulaId parse_and() {
    FormulaId l = parse_prefix();
    while (at_ident("and")) {
      ++pos;
      l = f_and(a, l, parse_prefix());
    }
    return l;
  }
  FormulaId parse_prefix() {
    if (at_ident("not")) {
      ++pos;
      return f_not(a, parse_prefix());
    }
    if (at_ident("all") || at_ident("exists")) {
      bool is_all = peek().text == "all";
      ++pos;
      if (peek().kind != PToken::Var) fail("quantifier needs a noema");
      std::uint32_t binder = static_cast<std::uint32_t>(peek().num);
      ++pos;
      expect(PToken::Dot, "'.'");
      FormulaId body = parse_prefix();
      return is_all ? a.universal(binder, body) : f_exists(a, binder, body);
    }
    return parse_primary_formula();
  }
  FormulaId parse_primary_formula() {
    // Try "term in term" first with rollback.
    std::size_t save = pos;
    try {
      TermId member = parse_term();
      if (at_ident("in")) {
        ++pos;
        TermId host = parse_term();
        return f_in(a, member, host);
      }
    } catch (const Error&) {
    }
    pos = save;
    if (at_ident("TT")) {
      ++pos;
      expect(PToken::LParen, "'('");
      FormulaId body = parse_formula();
      expect(PToken::RParen, "')'");
      return f_tt(a, body);
    }
    if (at_ident("nor")) {
      ++pos;
      expect(PToken::LParen, "'('");
      FormulaId x = parse_formula();
      expect(PToken::Comma, "','");
      FormulaId y = parse_formula();
      expect(PToken::RParen, "')'");
      return a.joint_formula(x, y);
    }
    if (at_ident("eq")) {
      ++pos;
      expect(PToken::LParen, "'('");
      TermId x = parse_term();
      expect(PToken::Comma, "','");
      TermId y = parse_term();
      expect(PToken::RParen, "')'");
      return identity_formula(a, x, y);
    }
    if (peek().kind == PToken::LParen) {
      ++pos;
      FormulaId inner = parse_formula();
      expect(PToken::RParen, "')'");
      return inner;
    }
    fail("expected a formula");
  }
};

}  // namespace

ParseResult parse_presentable(Arena& a, std::string_view text, Category cat) {
  auto try_cat = [&](Category c) -> std::optional<Expr> {
    PParser p{a, ptokenize(text)};
    try {
      if (c == Category::term) {
        TermId t = p.parse_term();
        if (p.peek().kind != PToken::End) return std::nullopt;
        return Expr::term(t);
      }
      FormulaId f = p.parse_formula();
      if (p.peek().kind != PToken::End) return std::nullopt;
      return Expr::formula(f);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (cat == Category::term || cat == Category::formula) {
    auto r = try_cat(cat);
    if (!r)
      throw Error(Errc::not_in_category,
                  cat == Category::term ? "not a presentable term" : "not a presentable formula");
    return {*r, cat};
  }
  auto t = try_cat(Category::term);
  auto f = try_cat(Category::formula);
  if (t && f) throw AmbiguousError(*t, *f, "presentable text parses as term and formula");
  if (t) return {*t, Category::term};
  if (f) return {*f, Category::formula};
  throw Error(Errc::not_in_category, "not presentable in either category");
}

}  // namespace libra::syntax
