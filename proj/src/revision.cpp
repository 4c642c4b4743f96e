#include "libra/revision.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "libra/error.hpp"
#include "libra/goedel.hpp"

namespace libra::revision {

using syntax::Arena;
using syntax::Expr;
using syntax::FormulaId;
using syntax::Node;
using syntax::Tag;
using syntax::TermId;

StageState Fragment::zero_state() const {
  StageState s;
  s.bits.assign(state_width, 0);
  return s;
}

void Fragment::build_indexes() {
  abstractions.clear();
  for (TermId t : universe)
    if (arena->node(t).tag == Tag::Abstraction) abstractions.push_back(t);
  atom_index.clear();
  std::size_t pos = 0;
  for (TermId m : universe)
    for (TermId c : abstractions) atom_index[{m.id, c.id}] = pos++;
  flag_index.clear();
  for (FormulaId f : tracked) {
    if (!flag_index.count(f.id)) flag_index[f.id] = pos++;
  }
  past_initial_bit.reset();
  if (euro_enabled) past_initial_bit = pos++;
  state_width = pos;
}

FormulaId Fragment::instantiate(std::uint32_t body, std::uint32_t binder, TermId t) const {
  std::lock_guard<std::mutex> lock(inst_mu_);
  auto key = std::make_tuple(body, binder, t.id);
  auto it = inst_cache_.find(key);
  if (it != inst_cache_.end()) return FormulaId{it->second};
  FormulaId r = syntax::substitute_formula(*arena, t, binder, FormulaId{body});
  inst_cache_.emplace(key, r.id);
  return r;
}

// ---------------------------------------------------------------------------
// Eval

bool Eval::formula(FormulaId id) {
  bool use_memo = identity_depth_ == 0;
  if (use_memo) {
    auto it = memo_.find(id.id);
    if (it != memo_.end()) return it->second;
  }
  const Node n = f_.arena->node(id);
  bool r = false;
  switch (n.tag) {
    case Tag::Atom:
      r = membership(TermId{n.b}, TermId{n.a});
      break;
    case Tag::JointFormula:
      r = !formula(FormulaId{n.a}) && !formula(FormulaId{n.b});
      break;
    case Tag::Universal: {
      r = true;
      for (TermId t : f_.universe) {
        if (!syntax::substitutable(*f_.arena, t, n.a, Expr::formula(FormulaId{n.b}))) continue;
        if (!formula(f_.instantiate(n.b, n.a, t))) {
          r = false;
          break;
        }
      }
      break;
    }
    default:
      throw Error(Errc::unresolved_term, "eval: not a formula node");
  }
  if (use_memo) memo_.emplace(id.id, r);
  return r;
}

bool Eval::identity(TermId x, TermId y) {
  if (f_.identity_mode == IdentityMode::structural || identity_depth_ > 0) return x == y;
  if (x == y) return true;
  ++identity_depth_;
  bool r = formula(syntax::identity_formula(*f_.arena, x, y));
  --identity_depth_;
  return r;
}

bool Eval::membership(TermId member, TermId host) {
  auto resolve = [&](TermId t) -> TermId {
    const Node n = f_.arena->node(t);
    if (n.tag != Tag::Noema) return t;
    auto it = f_.alias.find(n.a);
    if (it == f_.alias.end())
      throw Error(Errc::unresolved_term, "noema v" + std::to_string(n.a) + " has no alias");
    return it->second;
  };
  member = resolve(member);
  host = resolve(host);
  const Node h = f_.arena->node(host);
  switch (h.tag) {
    case Tag::Abstraction: {
      auto it = f_.atom_index.find({member.id, host.id});
      if (it == f_.atom_index.end())
        throw Error(Errc::unresolved_term,
                    "membership atom outside the fragment universe: " +
                        syntax::print(*f_.arena, Expr::term(host), syntax::Form::presentable));
      return s_.bits[it->second] != 0;
    }
    case Tag::JointTerm:
      return !membership(member, TermId{h.a}) && !membership(member, TermId{h.b});
    case Tag::Alethizor: {
      for (const auto& [name_term, sentence] : f_.registry) {
        if (!identity(member, name_term)) continue;
        auto it = f_.flag_index.find(sentence.id);
        if (it != f_.flag_index.end() && s_.bits[it->second]) return true;
      }
      return false;
    }
    case Tag::Enumerator: {
      if (!f_.euro_enabled) return false;  // € stays empty when undeclared
      if (!s_.bits[*f_.past_initial_bit]) return false;  // empty at stage 0
      for (const auto& p : f_.euro_pairs)
        if (identity(member, p)) return true;
      return false;
    }
    default:
      throw Error(Errc::unresolved_term, "membership in an unsupported host term");
  }
}

// ---------------------------------------------------------------------------
// Stage dynamics

StageState step(const Fragment& f, const StageState& s) {
  Eval ev(f, s);
  StageState next;
  next.bits.assign(f.state_width, 0);
  if (f.past_initial_bit) next.bits[*f.past_initial_bit] = 1;
  for (TermId m : f.universe) {
    for (TermId c : f.abstractions) {
      const Node abs = f.arena->node(c);
      std::size_t pos = f.atom_index.at({m.id, c.id});
      bool guard = syntax::substitutable(*f.arena, m, abs.a, Expr::formula(FormulaId{abs.b}));
      next.bits[pos] = guard && ev.formula(f.instantiate(abs.b, abs.a, m)) ? 1 : 0;
    }
  }
  for (FormulaId tf : f.tracked) {
    std::size_t pos = f.flag_index.at(tf.id);
    next.bits[pos] = ev.formula(tf) ? 1 : 0;
  }
  return next;
}

StageState limit_of_cycle(const std::vector<StageState>& states, std::size_t cycle_start) {
  StageState lim;
  lim.bits.assign(states.front().bits.size(), 1);
  for (std::size_t i = cycle_start; i < states.size(); ++i)
    for (std::size_t b = 0; b < lim.bits.size(); ++b)
      lim.bits[b] = lim.bits[b] && states[i].bits[b];
  return lim;
}

StageTrace run(std::shared_ptr<const Fragment> f) {
  StageTrace tr;
  tr.fragment = f;
  tr.banner = "fragment-relative run: quantifiers relativized to a " +
              std::to_string(f->universe.size()) +
              "-term universe; closure means first repeated block opening";
  StageState cur = f->zero_state();
  std::vector<StageState> openings;
  for (std::uint32_t b = 0; b <= f->budget.max_blocks; ++b) {
    for (std::size_t prev = 0; prev < openings.size(); ++prev) {
      if (openings[prev] == cur) {
        tr.converged = true;
        tr.closure_first = prev;
        tr.closure_block = b;
        return tr;
      }
    }
    if (b == f->budget.max_blocks) break;  // block budget exhausted
    openings.push_back(cur);
    TraceBlock block;
    block.states.push_back(cur);
    std::map<std::vector<std::uint8_t>, std::size_t> seen;
    seen[cur.bits] = 0;
    bool cycle_found = false;
    while (block.states.size() < f->budget.max_steps_per_block) {
      StageState next = step(*f, block.states.back());
      auto it = seen.find(next.bits);
      if (it != seen.end()) {
        block.cycle_start = it->second;
        cycle_found = true;
        break;
      }
      seen[next.bits] = block.states.size();
      block.states.push_back(std::move(next));
    }
    if (!cycle_found) {
      tr.blocks.push_back(std::move(block));
      tr.converged = false;
      return tr;  // step budget exhausted; partial trace
    }
    cur = limit_of_cycle(block.states, block.cycle_start);
    tr.blocks.push_back(std::move(block));
  }
  tr.converged = false;
  return tr;
}

// ---------------------------------------------------------------------------
// Words and classification

Word StageTrace::word_of(const std::function<bool(const StageState&)>& fn) const {
  Word w;
  w.bits.reserve(blocks.size());
  for (const auto& b : blocks) {
    std::vector<std::uint8_t> row;
    row.reserve(b.states.size());
    for (const auto& s : b.states) row.push_back(fn(s) ? 1 : 0);
    w.bits.push_back(std::move(row));
  }
  return w;
}

const Word& StageTrace::word(FormulaId f) const {
  std::lock_guard<std::mutex> lock(*mu_);
  auto it = word_cache_.find(f.id);
  if (it != word_cache_.end()) return it->second;
  Word w = word_of([&](const StageState& s) { return Eval(*fragment, s).formula(f); });
  return word_cache_.emplace(f.id, std::move(w)).first->second;
}

Word StageTrace::w_not(const Word& w) const {
  Word r = w;
  for (auto& row : r.bits)
    for (auto& b : row) b = !b;
  return r;
}
Word StageTrace::w_and(const Word& x, const Word& y) const {
  Word r = x;
  for (std::size_t i = 0; i < r.bits.size(); ++i)
    for (std::size_t j = 0; j < r.bits[i].size(); ++j) r.bits[i][j] &= y.bits[i][j];
  return r;
}
Word StageTrace::w_or(const Word& x, const Word& y) const {
  Word r = x;
  for (std::size_t i = 0; i < r.bits.size(); ++i)
    for (std::size_t j = 0; j < r.bits[i].size(); ++j) r.bits[i][j] |= y.bits[i][j];
  return r;
}
Word StageTrace::w_imp(const Word& x, const Word& y) const { return w_or(w_not(x), y); }
Word StageTrace::w_iff(const Word& x, const Word& y) const {
  return w_and(w_imp(x, y), w_imp(y, x));
}

Word StageTrace::w_tt(const Word& w) const {
  Word r = w;
  for (std::size_t b = 0; b < r.bits.size(); ++b) {
    for (std::size_t k = r.bits[b].size(); k-- > 1;) r.bits[b][k] = w.bits[b][k - 1];
    if (b == 0) {
      r.bits[b][0] = 0;
    } else {
      std::uint8_t all = 1;
      const auto& prev = blocks[b - 1];
      for (std::size_t k = prev.cycle_start; k < prev.states.size(); ++k)
        all = all && w.bits[b - 1][k];
      r.bits[b][0] = all;
    }
  }
  return r;
}

bool StageTrace::regime_all(const Word& w, bool value) const {
  if (!converged) throw Error(Errc::not_converged, "trace did not converge");
  for (std::uint64_t b = closure_first; b < closure_block; ++b)
    for (std::uint8_t bit : w.bits[b])
      if (static_cast<bool>(bit) != value) return false;
  return true;
}

Classification StageTrace::classify_word(const Word& w) const {
  Classification c{Status::MinorThesis};
  if (regime_all(w, true)) {
    c.status = Status::MaximThesis;
    c.veridic = true;
  } else if (regime_all(w, false)) {
    c.status = Status::NonThesis;
    c.pseudic = true;
  } else {
    c.status = Status::MinorThesis;
    c.paradoxical = true;
  }
  return c;
}

Valor StageTrace::valor_of(const Word& w) const {
  if (thesis(w)) return Valor{true, fragment_closure()};
  for (std::size_t b = blocks.size(); b-- > 0;) {
    const auto& row = w.bits[b];
    std::optional<std::size_t> last;
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k]) last = k;
    if (!last) continue;
    if (*last >= blocks[b].cycle_start)
      return Valor{false, StageIndex{b + 1, 0}};  // true cofinally inside the block
    return Valor{false, StageIndex{b, *last}};
  }
  return Valor{false, StageIndex{0, 0}};  // sup ∅
}

bool StageTrace::is_tracked(FormulaId f) const {
  return fragment->flag_index.count(f.id) != 0;
}

Classification StageTrace::classify(FormulaId f) const {
  if (!is_tracked(f)) throw Error(Errc::untracked, "sentence is not tracked in this trace");
  return classify_word(word(f));
}

Relations relations(const StageTrace& t, FormulaId A, FormulaId B) {
  const Word& wa = t.word(A);
  const Word& wb = t.word(B);
  Relations r{};
  r.parivalent = wa == wb;
  r.altervalent = !r.parivalent;
  r.contravalent = wa == t.w_not(wb);
  r.ambovalence = t.w_and(wa, wb);
  r.velvalence = t.w_or(wa, wb);
  r.subvalence = t.w_imp(wa, wb);
  r.homovalence = t.w_iff(wa, wb);
  bool any_both = false;
  for (const auto& row : r.ambovalence.bits)
    for (auto bit : row) any_both |= bit != 0;
  r.incompatible = !any_both;
  r.paridictive = t.valor_of(wa) == t.valor_of(wb);
  r.contradictive = r.contravalent && !r.paridictive;
  r.complementary = r.contravalent && r.paridictive;
  r.connected = !(t.thesis(wa) && t.thesis(wb)) || t.thesis(r.ambovalence);
  return r;
}

bool kind(const StageTrace& t, TermId a) {
  const Fragment& f = *t.fragment;
  if (std::find(f.universe.begin(), f.universe.end(), a) == f.universe.end())
    throw Error(Errc::unresolved_term, "kind: term not in the fragment universe");
  for (TermId x : f.universe) {
    const Word& w = t.word(f.arena->atom(a, x));
    if (!t.regime_all(w, true) && !t.regime_all(w, false)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json word_to_json(const StageTrace& t, const Word& w) {
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t b = 0; b < w.bits.size(); ++b) {
    std::string prefix, cycle;
    for (std::size_t k = 0; k < w.bits[b].size(); ++k) {
      char c = w.bits[b][k] ? '1' : '0';
      if (k < t.blocks[b].cycle_start)
        prefix.push_back(c);
      else
        cycle.push_back(c);
    }
    blocks.push_back({{"prefix", prefix}, {"cycle", cycle}});
  }
  return blocks;
}

nlohmann::json valency_json(const StageTrace& t, const Word& w) {
  return word_to_json(t, w);
}

nlohmann::json StageTrace::to_json() const {
  nlohmann::json j;
  j["banner"] = banner;
  j["name"] = fragment->name;
  j["converged"] = converged;
  j["budget"] = {{"max_steps_per_block", fragment->budget.max_steps_per_block},
                 {"max_blocks", fragment->budget.max_blocks}};
  if (converged) {
    j["closure"] = {{"first_block", closure_first}, {"closure_block", closure_block}};
  }
  nlohmann::json blist = nlohmann::json::array();
  for (const auto& b : blocks)
    blist.push_back({{"states", b.states.size()}, {"cycle_start", b.cycle_start}});
  j["blocks"] = blist;
  nlohmann::json sentences = nlohmann::json::array();
  for (FormulaId f : fragment->tracked) {
    nlohmann::json s;
    s["formula"] =
        syntax::print(*fragment->arena, Expr::formula(f), syntax::Form::presentable);
    const Word& w = word(f);
    s["valency"] = word_to_json(*this, w);
    if (converged) {
      Classification c = classify_word(w);
      s["classification"] = c.status == Status::MaximThesis  ? "maxim"
                            : c.status == Status::MinorThesis ? "minor"
                                                              : "non-thesis";
      Valor v = valor_of(w);
      s["valor"] = {{"at_closure", v.at_closure}, {"block", v.idx.block}, {"offset", v.idx.offset}};
    }
    sentences.push_back(std::move(s));
  }
  j["sentences"] = sentences;
  return j;
}

// ---------------------------------------------------------------------------
// Fragment loading

namespace {

void collect_closed_terms(Arena& a, std::uint32_t id, std::vector<TermId>& out,
                          std::set<std::uint32_t>& seen) {
  if (seen.count(id)) return;
  seen.insert(id);
  const Node n = a.node(id);
  if (n.tag == Tag::NumeralTerm)
    throw Error(Errc::bad_fragment, "fragments cannot contain opaque numeral leaves");
  bool is_term = n.tag < Tag::Atom;
  if (is_term && a.noemata(id).empty()) out.push_back(TermId{id});
  switch (n.tag) {
    case Tag::JointTerm:
    case Tag::Atom:
    case Tag::JointFormula:
      collect_closed_terms(a, n.a, out, seen);
      collect_closed_terms(a, n.b, out, seen);
      break;
    case Tag::Abstraction:
    case Tag::Universal:
      collect_closed_terms(a, n.b, out, seen);
      break;
    default:
      break;
  }
}

// Replace every aliased free noema by its prefix representative.
Expr apply_aliases(Arena& a, Expr e, const std::unordered_map<std::uint32_t, TermId>& alias) {
  auto ns = a.noemata(e.id);  // copy: substitution changes e
  for (std::uint32_t v : ns) {
    auto it = alias.find(v);
    if (it == alias.end())
      throw Error(Errc::bad_fragment,
                  "free noema v" + std::to_string(v) + " has no enumeration alias");
    e = syntax::substitute(a, it->second, v, e);
  }
  return e;
}

}  // namespace

std::shared_ptr<Fragment> load_fragment(Arena& a, const nlohmann::json& j,
                                        const std::string& name) {
  auto f = std::make_shared<Fragment>();
  f->arena = &a;
  f->name = name.empty() ? j.value("name", "") : name;
  f->euro_enabled = j.value("euro_enabled", false);
  std::string mode = j.value("identity_mode", "structural");
  if (mode == "structural")
    f->identity_mode = IdentityMode::structural;
  else if (mode == "leibniz")
    f->identity_mode = IdentityMode::leibniz;
  else
    throw Error(Errc::bad_fragment, "identity_mode must be structural or leibniz");
  if (j.contains("budget")) {
    f->budget.max_steps_per_block = j["budget"].value("max_steps_per_block", 256u);
    f->budget.max_blocks = j["budget"].value("max_blocks", 8u);
  }
  if (f->budget.max_steps_per_block == 0 || f->budget.max_blocks == 0)
    throw Error(Errc::bad_fragment, "budgets must be at least 1");

  std::uint64_t prefix_size = j.value("enum_prefix_size", 0ull);
  if (prefix_size > 8) throw Error(Errc::bad_fragment, "enum_prefix_size capped at 8");
  if (prefix_size > 0) f->enum_prefix = enumeration::enumerate_prefix(a, prefix_size);
  for (const auto& e : f->enum_prefix.entries)
    f->alias.emplace(static_cast<std::uint32_t>(e.index), e.representative);

  if (f->euro_enabled) {
    if (prefix_size == 0)
      throw Error(Errc::euro_disabled, "euro_enabled needs a nonempty enumeration prefix");
    for (const auto& e : f->enum_prefix.entries) {
      TermId numeral = goedel::numeral_expr(a, BigNat(e.index));
      f->euro_pairs.push_back(syntax::pair_term(a, numeral, e.representative));
    }
  }

  std::vector<Expr> roots;
  std::vector<TermId> declared_terms;
  for (const auto& s : j.value("terms", nlohmann::json::array())) {
    Expr t = syntax::parse_presentable(a, s.get<std::string>(), syntax::Category::term).expr;
    t = apply_aliases(a, t, f->alias);
    declared_terms.push_back(t.as_term());
    roots.push_back(t);
  }
  std::vector<FormulaId> declared;
  for (const auto& s : j.value("formulas", nlohmann::json::array())) {
    Expr fo = syntax::parse_presentable(a, s.get<std::string>(), syntax::Category::formula).expr;
    fo = apply_aliases(a, fo, f->alias);
    declared.push_back(fo.as_formula());
    roots.push_back(fo);
  }
  for (const auto& r : j.value("registry", nlohmann::json::array())) {
    Expr t = syntax::parse_presentable(a, r.at("term").get<std::string>(),
                                       syntax::Category::term)
                 .expr;
    Expr fo = syntax::parse_presentable(a, r.at("formula").get<std::string>(),
                                        syntax::Category::formula)
                  .expr;
    t = apply_aliases(a, t, f->alias);
    fo = apply_aliases(a, fo, f->alias);
    if (!a.noemata(fo.id).empty())
      throw Error(Errc::bad_fragment, "registry sentences must be closed");
    f->registry.emplace_back(t.as_term(), fo.as_formula());
    declared.push_back(fo.as_formula());
    roots.push_back(t);
    roots.push_back(fo);
  }
  if (f->euro_enabled)
    for (TermId p : f->euro_pairs) roots.push_back(Expr::term(p));

  std::set<std::uint32_t> seen;
  for (Expr r : roots) collect_closed_terms(a, r.id, f->universe, seen);
  // Tracked formulas and their negjunctions, deduplicated in order.
  std::set<std::uint32_t> have;
  for (FormulaId d : declared) {
    if (have.insert(d.id).second) f->tracked.push_back(d);
  }
  for (FormulaId d : declared) {
    FormulaId neg = syntax::f_not(a, d);
    if (have.insert(neg.id).second) f->tracked.push_back(neg);
  }
  for (FormulaId tkd : f->tracked)
    if (!a.noemata(tkd.id).empty())
      throw Error(Errc::bad_fragment, "tracked formulas must be closed after aliasing");

  f->build_indexes();
  return f;
}

nlohmann::json fragment_to_json(const Fragment& f) {
  nlohmann::json j;
  j["name"] = f.name;
  j["identity_mode"] = f.identity_mode == IdentityMode::structural ? "structural" : "leibniz";
  j["euro_enabled"] = f.euro_enabled;
  j["enum_prefix_size"] = f.enum_prefix.entries.size();
  j["budget"] = {{"max_steps_per_block", f.budget.max_steps_per_block},
                 {"max_blocks", f.budget.max_blocks}};
  nlohmann::json terms = nlohmann::json::array();
  for (TermId t : f.universe)
    terms.push_back(syntax::print(*f.arena, Expr::term(t), syntax::Form::presentable));
  j["terms"] = terms;
  nlohmann::json formulas = nlohmann::json::array();
  for (FormulaId fo : f.tracked)
    formulas.push_back(syntax::print(*f.arena, Expr::formula(fo), syntax::Form::presentable));
  j["formulas"] = formulas;
  nlohmann::json reg = nlohmann::json::array();
  for (const auto& [t, fo] : f.registry)
    reg.push_back({{"term", syntax::print(*f.arena, Expr::term(t), syntax::Form::presentable)},
                   {"formula",
                    syntax::print(*f.arena, Expr::formula(fo), syntax::Form::presentable)}});
  j["registry"] = reg;
  return j;
}

}  // namespace libra::revision
