#pragma once

#include <stdexcept>
#include <string>

namespace libra {

enum class Errc {
  malformed_formation,
  not_in_category,
  ambiguous,
  zero_not_formation,
  zero_operand,
  budget_exceeded,
  not_term_code,
  wrong_noemata,
  not_cognomen,
  not_enumerated,
  unresolved_term,
  euro_disabled,
  not_converged,
  untracked,
  bad_fragment,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

  // Exit-code policy: budget/convergence failures are 2, domain errors 1.
  int exit_code() const {
    return (code_ == Errc::budget_exceeded || code_ == Errc::not_converged) ? 2 : 1;
  }

  const char* code_name() const {
    switch (code_) {
      case Errc::malformed_formation: return "MalformedFormation";
      case Errc::not_in_category: return "NotInCategory";
      case Errc::ambiguous: return "Ambiguous";
      case Errc::zero_not_formation: return "ZeroNotFormation";
      case Errc::zero_operand: return "ZeroOperand";
      case Errc::budget_exceeded: return "BudgetExceeded";
      case Errc::not_term_code: return "NotTermCode";
      case Errc::wrong_noemata: return "WrongNoemata";
      case Errc::not_cognomen: return "NotCognomen";
      case Errc::not_enumerated: return "NotEnumerated";
      case Errc::unresolved_term: return "UnresolvedTerm";
      case Errc::euro_disabled: return "EuroDisabled";
      case Errc::not_converged: return "NotConverged";
      case Errc::untracked: return "Untracked";
      case Errc::bad_fragment: return "BadFragment";
      case Errc::io_error: return "FileNotFound";
    }
    return "Error";
  }

 private:
  Errc code_;
};

}  // namespace libra
