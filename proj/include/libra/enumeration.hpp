#pragma once

#include <cstdint>
#include <vector>

#include "libra/bignat.hpp"
#include "libra/syntax.hpp"

namespace libra::enumeration {

enum class Verdict { variant, not_variant, unknown };

// Alphabetological variance on cognomina. variant / not_variant are sound;
// unknown is returned whenever the decision would need more than the
// decidable core (propositional equivalence over canonicalized letters,
// joint commutation, existential closures of abstractions).
Verdict variant(syntax::Arena& a, syntax::TermId x, syntax::TermId y);

// Variance of closed propositions (the Lindenbaum–Tarski core).
Verdict proposition_variant(syntax::Arena& a, syntax::FormulaId x, syntax::FormulaId y);

struct EnumEntry {
  std::uint64_t index = 0;
  syntax::TermId representative;
  BigNat value;
  bool had_unknowns = false;  // some comparisons were coerced unknown -> not-variant
};

struct EnumPrefix {
  std::vector<EnumEntry> entries;
};

// First K entries of the enumeration e: cognomina in increasing value,
// one per variance class, scanning values below 2^max_bits.
EnumPrefix enumerate_prefix(syntax::Arena& a, std::uint64_t K, std::uint32_t max_bits = 14);

// Meta-level ◂ via prefix indices. NotEnumerated when a term has no
// variant in the prefix.
bool order_lt(syntax::Arena& a, syntax::TermId x, syntax::TermId y, const EnumPrefix& ctx);
bool order_le(syntax::Arena& a, syntax::TermId x, syntax::TermId y, const EnumPrefix& ctx);

}  // namespace libra::enumeration
