#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "libra/bignat.hpp"
#include "libra/codec.hpp"
#include "libra/error.hpp"
#include "libra/syntax.hpp"

namespace libra::goedel {

// ⌜n⌝ as a shared-structure value: the successor chain is implicit in the
// source; bit_length is computed by the L(n+1) = 202 + 6·L(n) recurrence.
class CodeDag {
 public:
  explicit CodeDag(BigNat source) : source_(std::move(source)) {}
  const BigNat& source() const { return source_; }
  bool is_zero() const { return source_ == 0; }
  CodeDag inner() const { return CodeDag(source_ - 1); }

  // Exact bit length, or nullopt when it exceeds cap.
  std::optional<BigNat> bit_length(const BigNat& cap) const;
  // Convenience for small codes; throws BudgetExceeded past the cap.
  BigNat bit_length_exact(const BigNat& cap = BigNat(1) << 24) const;

 private:
  BigNat source_;
};

CodeDag goedel_code(const BigNat& n);

// ⌜e⌝⌜⌢⌝⌜f⌝ = ⌜e⌢f⌝.
CodeDag code_concat(const BigNat& e, const BigNat& f);

// The code's austere bit string as a number / string; BudgetExceeded when
// bit_length > budget_bits (the error message carries the requirement).
BigNat materialize(const CodeDag& c, std::uint64_t budget_bits);
std::string materialize_string(const CodeDag& c, std::uint64_t budget_bits);

// ⌜n⌝ as an expression (expanded for n ≤ kNumeralExpandMax, leaf above).
syntax::TermId numeral_expr(syntax::Arena& a, const BigNat& n);

}  // namespace libra::goedel
