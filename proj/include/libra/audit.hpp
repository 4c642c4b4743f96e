#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "libra/revision.hpp"

namespace libra::audit {

struct CheckOutcome {
  std::string name;
  std::uint64_t instances = 0;
  std::uint64_t passes = 0;
  std::vector<nlohmann::json> failures;  // replayable witnesses
  std::vector<nlohmann::json> skips;     // named skips with reasons
  std::vector<nlohmann::json> reported;  // tolerated deviations, reported not asserted
  bool ok() const { return failures.empty(); }
};

struct AuditReport {
  std::vector<CheckOutcome> checks;
  bool all_ok() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
  void merge(AuditReport other);
};

AuditReport check_posits(const revision::StageTrace& t);
AuditReport check_regulations(const revision::StageTrace& t);
std::optional<nlohmann::json> find_mp_failure(const revision::StageTrace& t);
AuditReport check_exfalso(const revision::StageTrace& t);
AuditReport disconnection_census(const revision::StageTrace& t);
AuditReport check_stage0_laws(const revision::StageTrace& t);
// Checks maxim(a = {x|x∈a}) ⇔ maxim(a = ∅) on fragments that carry the
// witnesses; a mismatch is reported with a witness, never silently passed.
AuditReport check_identity_collapse(const revision::StageTrace& t);

AuditReport run_all(const revision::StageTrace& t, unsigned threads = 1);

}  // namespace libra::audit
