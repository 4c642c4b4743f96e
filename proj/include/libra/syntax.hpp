#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "libra/bignat.hpp"
#include "libra/error.hpp"

namespace libra::syntax {

// Node tags. Terms: Noema..NumeralTerm; formulas: Atom..Universal.
enum class Tag : std::uint8_t {
  Noema,        // a = noema index (v_a = |_{a+5})
  Alethizor,    // T = |_3
  Enumerator,   // € = |_4
  JointTerm,    // ↓ b c; a = first term, b = second term
  Abstraction,  // ^ y A; a = binder index, b = body formula
  NumeralTerm,  // opaque ⌜n⌝ leaf; a = slot in the arena numeral table
  Atom,         // formation b⌢a, read "a ∈ b"; a = host term b, b = member term a
  JointFormula, // ↓ A B
  Universal,    // ∀ y A; a = binder index, b = body formula
};

struct TermId {
  std::uint32_t id = 0;
  friend bool operator==(TermId, TermId) = default;
};
struct FormulaId {
  std::uint32_t id = 0;
  friend bool operator==(FormulaId, FormulaId) = default;
};

// A term or a formula; the category is part of the value.
struct Expr {
  std::uint32_t id = 0;
  bool is_term = false;
  static Expr term(TermId t) { return Expr{t.id, true}; }
  static Expr formula(FormulaId f) { return Expr{f.id, false}; }
  TermId as_term() const { return TermId{id}; }
  FormulaId as_formula() const { return FormulaId{id}; }
  friend bool operator==(Expr, Expr) = default;
};

struct Node {
  Tag tag;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

// Largest n for which ⌜n⌝ is built as a real expression; above this a
// NumeralTerm leaf stands in and expands only on demand.
inline constexpr std::uint64_t kNumeralExpandMax = 256;

// Hash-consing arena. Nodes are immutable once interned; equal structure
// implies equal id. Insertions and cache fills are serialized by a mutex.
class Arena {
 public:
  Arena();

  TermId noema(std::uint32_t index);
  TermId alethizor();
  TermId enumerator();
  TermId joint_term(TermId first, TermId second);
  TermId abstraction(std::uint32_t binder, FormulaId body);
  FormulaId atom(TermId b_host, TermId a_member);  // a ∈ b
  FormulaId joint_formula(FormulaId first, FormulaId second);
  FormulaId universal(std::uint32_t binder, FormulaId body);

  // ⌜n⌝ as a term: expanded for n ≤ kNumeralExpandMax, else a leaf.
  TermId numeral_term(const BigNat& n);

  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  const Node& node(TermId t) const { return nodes_[t.id]; }
  const Node& node(FormulaId f) const { return nodes_[f.id]; }
  std::size_t size() const { return nodes_.size(); }

  bool is_numeral_leaf(std::uint32_t id) const { return nodes_[id].tag == Tag::NumeralTerm; }
  const BigNat& numeral_source(std::uint32_t id) const;
  // Level of an *expanded* numeral node, if this exact node was produced by
  // numeral_term (used to stop length/print recursions early).
  std::optional<std::uint64_t> expanded_numeral_level(std::uint32_t id) const;

  // Noemata per Definition 2.1; returned set is sorted, owned by the arena.
  const std::vector<std::uint32_t>& noemata(std::uint32_t id);
  bool contains_alethizor(std::uint32_t id);
  bool contains_enumerator(std::uint32_t id);

 private:
  std::uint32_t intern(Node n);
  TermId expand_numeral(std::uint64_t n);

  mutable std::mutex mu_;
  std::vector<Node> nodes_;
  struct NodeHash {
    std::size_t operator()(const Node& n) const {
      std::size_t h = static_cast<std::size_t>(n.tag);
      h = h * 1000003u ^ n.a;
      h = h * 1000003u ^ n.b;
      return h;
    }
  };
  std::unordered_map<Node, std::uint32_t, NodeHash> interned_;
  std::vector<BigNat> numeral_sources_;
  std::map<BigNat, std::uint32_t> numeral_slots_;
  std::vector<TermId> numeral_levels_;                      // expanded ⌜0..k⌝
  std::unordered_map<std::uint32_t, std::uint64_t> level_of_;  // node -> level
  // caches (grow with nodes_)
  std::vector<std::int32_t> noemata_cache_;  // -1 unknown, else set-pool index
  std::vector<std::vector<std::uint32_t>> set_pool_;
  std::map<std::vector<std::uint32_t>, std::int32_t> set_pool_index_;
  std::vector<std::int8_t> const_cache_;  // -1 unknown, else bit0 = T, bit1 = €
  std::int32_t noemata_locked(std::uint32_t id);
  std::int8_t consts_locked(std::uint32_t id);
};

enum class Category { term, formula, auto_detect };
enum class Form { austere, bare, presentable };

struct ParseResult {
  Expr expr;
  Category detected;  // term or formula
};

class AmbiguousError : public Error {
 public:
  AmbiguousError(Expr as_term, Expr as_formula, const std::string& what)
      : Error(Errc::ambiguous, what), as_term(as_term), as_formula(as_formula) {}
  Expr as_term;
  Expr as_formula;
};

// Whole-string parse of austere ("|...|...") or bare ("|_3|_3") text.
ParseResult parse(Arena& a, std::string_view text, Category cat);
// Same, starting from a symbol-index sequence.
ParseResult parse_symbols(Arena& a, const std::vector<std::uint64_t>& syms, Category cat);
// Presentable ASCII grammar (see README); `eq(a,b)`, `pair(a,b)` and
// `code(n)` are accepted on input only.
ParseResult parse_presentable(Arena& a, std::string_view text, Category cat);

std::string print(Arena& a, Expr e, Form form, std::uint64_t max_bits = 1u << 20);

// Formation symbols of e, leftmost first; throws BudgetExceeded when the
// flattening would exceed max_symbols.
std::vector<std::uint64_t> flatten_symbols(Arena& a, Expr e, std::uint64_t max_symbols = 1u << 22);

// Exact formation bit length with numeral leaves folded in symbolically:
// value = c + Σ coeff·L(source) over numeral leaves.
struct SymLen {
  BigNat c = 0;
  std::map<BigNat, BigNat> terms;
  friend bool operator==(const SymLen&, const SymLen&) = default;
  bool numeric() const { return terms.empty(); }
};
SymLen expr_bit_length_sym(Arena& a, Expr e);
// nullopt when the exact length exceeds cap.
std::optional<BigNat> expr_bit_length_capped(Arena& a, Expr e, const BigNat& cap);

// Substitution function (a/u): capture-unchecked, no-op below a binder of u.
Expr substitute(Arena& a, TermId term, std::uint32_t u, Expr e);
TermId substitute_term(Arena& a, TermId term, std::uint32_t u, TermId e);
FormulaId substitute_formula(Arena& a, TermId term, std::uint32_t u, FormulaId e);

// F(a,u,e): "a is substitutable for u in e".
bool substitutable(Arena& a, TermId term, std::uint32_t u, Expr e);

std::uint64_t count_noema_occurrences(Arena& a, Expr e, std::uint32_t u);

struct TermClass {
  bool praenomen = false;
  bool cognomen = false;
  bool pronomen = false;
  bool nomen_with_noemata() const { return !cognomen; }
};
TermClass classify_term(Arena& a, TermId t);

std::uint64_t caliber(Arena& a, TermId t);  // NotCognomen if noemata present

// D7–D19 builders.
FormulaId f_not(Arena& a, FormulaId x);
FormulaId f_or(Arena& a, FormulaId x, FormulaId y);
FormulaId f_and(Arena& a, FormulaId x, FormulaId y);
FormulaId f_imp(Arena& a, FormulaId x, FormulaId y);
FormulaId f_iff(Arena& a, FormulaId x, FormulaId y);
FormulaId f_exists(Arena& a, std::uint32_t binder, FormulaId body);
FormulaId f_in(Arena& a, TermId member, TermId host);  // D17: a ∈ b
FormulaId f_tt(Arena& a, FormulaId body);              // D19
TermId t_comp(Arena& a, TermId x);
TermId t_union(Arena& a, TermId x, TermId y);
TermId t_inter(Arena& a, TermId x, TermId y);
TermId t_minus(Arena& a, TermId x, TermId y);
// D19's binder: least y ∉ ℵ(A) with every smaller noema present in A.
std::uint32_t d19_binder(Arena& a, FormulaId body);

// Recognizers for the printer and the audits.
std::optional<FormulaId> match_not(Arena& a, FormulaId f);
std::optional<std::pair<FormulaId, FormulaId>> match_or(Arena& a, FormulaId f);
std::optional<std::pair<FormulaId, FormulaId>> match_and(Arena& a, FormulaId f);
std::optional<std::pair<FormulaId, FormulaId>> match_imp(Arena& a, FormulaId f);
std::optional<std::pair<FormulaId, FormulaId>> match_iff(Arena& a, FormulaId f);
std::optional<std::pair<std::uint32_t, FormulaId>> match_exists(Arena& a, FormulaId f);
std::optional<FormulaId> match_tt(Arena& a, FormulaId f);
std::optional<TermId> match_comp(Arena& a, TermId t);
std::optional<std::pair<TermId, TermId>> match_union(Arena& a, TermId t);
std::optional<std::pair<TermId, TermId>> match_inter(Arena& a, TermId t);
std::optional<std::pair<TermId, TermId>> match_minus(Arena& a, TermId t);

// Leibniz–Russell identity a=b ≜ ∀u(a∈u → b∈u); the binder is the least
// noema absent from both terms.
FormulaId identity_formula(Arena& a, TermId x, TermId y);
// Kuratowski pair ⟨x,y⟩ over identity-based unordered pairs.
TermId pair_term(Arena& a, TermId x, TermId y);

}  // namespace libra::syntax
