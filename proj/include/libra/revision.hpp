#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "libra/enumeration.hpp"
#include "libra/syntax.hpp"

namespace libra::revision {

enum class IdentityMode { structural, leibniz };

struct Budget {
  std::uint32_t max_steps_per_block = 256;
  std::uint32_t max_blocks = 8;
};

// Ordinal ω·block + offset.
struct StageIndex {
  std::uint64_t block = 0;
  std::uint64_t offset = 0;
  friend bool operator==(const StageIndex&, const StageIndex&) = default;
  friend auto operator<=>(const StageIndex& a, const StageIndex& b) {
    if (auto c = a.block <=> b.block; c != 0) return c;
    return a.offset <=> b.offset;
  }
};

struct StageState {
  // Abstraction-membership atoms, then 𝕋 flags; euro fragments append one
  // past-initial bit so P7 can see that stage 0 is over.
  std::vector<std::uint8_t> bits;
  friend bool operator==(const StageState&, const StageState&) = default;
};

// A finite, subterm-closed universe with everything eval needs.
class Fragment {
 public:
  syntax::Arena* arena = nullptr;
  std::vector<syntax::TermId> universe;
  std::vector<syntax::TermId> abstractions;  // subset of universe
  std::vector<syntax::FormulaId> tracked;    // closed after aliasing; negjunctions included
  std::vector<std::pair<syntax::TermId, syntax::FormulaId>> registry;
  enumeration::EnumPrefix enum_prefix;
  std::vector<syntax::TermId> euro_pairs;  // ⟨⌜n⌝, e(n)⟩ for enumerated n
  std::unordered_map<std::uint32_t, syntax::TermId> alias;  // noema -> e(n)
  bool euro_enabled = false;
  IdentityMode identity_mode = IdentityMode::structural;
  Budget budget;
  std::string name;

  // derived indexing
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> atom_index;  // (member,abs)
  std::map<std::uint32_t, std::size_t> flag_index;                            // formula -> bit
  std::optional<std::size_t> past_initial_bit;                                // euro only
  std::size_t state_width = 0;

  StageState zero_state() const;
  void build_indexes();

  // P4 instantiation, interned per (body, binder, term).
  syntax::FormulaId instantiate(std::uint32_t body, std::uint32_t binder,
                                syntax::TermId t) const;

 private:
  mutable std::mutex inst_mu_;
  mutable std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint32_t>
      inst_cache_;
};

std::shared_ptr<Fragment> load_fragment(syntax::Arena& a, const nlohmann::json& j,
                                        const std::string& name = "");
nlohmann::json fragment_to_json(const Fragment& f);

// Same-stage truth per P1–P7 against one state.
class Eval {
 public:
  Eval(const Fragment& f, const StageState& s) : f_(f), s_(s) {}
  bool formula(syntax::FormulaId id);
  bool membership(syntax::TermId member, syntax::TermId host);
  bool identity(syntax::TermId x, syntax::TermId y);

 private:
  const Fragment& f_;
  const StageState& s_;
  std::unordered_map<std::uint32_t, bool> memo_;
  int identity_depth_ = 0;
};

StageState step(const Fragment& f, const StageState& s);
StageState limit_of_cycle(const std::vector<StageState>& states, std::size_t cycle_start);

struct TraceBlock {
  std::vector<StageState> states;  // states[0] is the block opening
  std::size_t cycle_start = 0;
};

// Truth bits of one sentence at every recorded stage, aligned to the blocks.
struct Word {
  std::vector<std::vector<std::uint8_t>> bits;
  friend bool operator==(const Word&, const Word&) = default;
};

enum class Status { MaximThesis, MinorThesis, NonThesis };

struct Classification {
  Status status;
  bool veridic = false;      // maxim
  bool pseudic = false;      // negjunction is a maxim
  bool paradoxical = false;  // minor
};

struct Valor {
  bool at_closure = false;
  StageIndex idx;  // sup of the true stages when not at closure (sup ∅ = 0)
  friend bool operator==(const Valor&, const Valor&) = default;
};

class StageTrace {
 public:
  std::shared_ptr<const Fragment> fragment;
  std::vector<TraceBlock> blocks;
  bool converged = false;
  std::uint64_t closure_first = 0;  // regime = blocks [closure_first, closure_block)
  std::uint64_t closure_block = 0;  // fragment closure opens this block
  std::string banner;

  StageIndex fragment_closure() const { return StageIndex{closure_block, 0}; }

  const Word& word(syntax::FormulaId f) const;  // evaluates and caches
  Word word_of(const std::function<bool(const StageState&)>& fn) const;

  // Word algebra.
  Word w_not(const Word& w) const;
  Word w_and(const Word& x, const Word& y) const;
  Word w_or(const Word& x, const Word& y) const;
  Word w_imp(const Word& x, const Word& y) const;
  Word w_iff(const Word& x, const Word& y) const;
  // 𝕋-shift: false at stage 0, previous bit at successors, eventually-always
  // over the approaching cycle at block openings.
  Word w_tt(const Word& w) const;

  bool regime_all(const Word& w, bool value) const;
  bool thesis(const Word& w) const { return !regime_all(w, false); }
  Classification classify_word(const Word& w) const;
  Valor valor_of(const Word& w) const;

  Classification classify(syntax::FormulaId f) const;  // Untracked if not tracked
  bool is_tracked(syntax::FormulaId f) const;

  nlohmann::json to_json() const;

 private:
  mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  mutable std::map<std::uint32_t, Word> word_cache_;
};

// Iterate with cycle detection; never throws on budget exhaustion — the
// returned trace carries converged = false instead.
StageTrace run(std::shared_ptr<const Fragment> f);

struct Relations {
  bool parivalent, altervalent, contravalent, incompatible;
  bool paridictive, contradictive, complementary, connected;
  Word ambovalence, velvalence, subvalence, homovalence;
};
Relations relations(const StageTrace& t, syntax::FormulaId A, syntax::FormulaId B);

bool kind(const StageTrace& t, syntax::TermId a);  // UnresolvedTerm if a ∉ universe

nlohmann::json valency_json(const StageTrace& t, const Word& w);
nlohmann::json word_to_json(const StageTrace& t, const Word& w);

}  // namespace libra::revision
