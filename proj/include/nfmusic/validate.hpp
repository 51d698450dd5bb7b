#pragma once

#include <string>
#include <vector>

#include "nfmusic/bench.hpp"

namespace nfmusic {

enum class CheckStatus { Pass, DegeneratePass, Fail };

struct CheckRow {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

std::string_view status_label(CheckStatus status);

// Invariant suite on the scenario geometry: steering norms, transform
// identity, Fresnel accuracy, subspace identities, identifiability,
// Fraunhofer distance. Never throws for scenario problems; they become rows.
std::vector<CheckRow> run_checks(const Scenario& s);

bool all_passed(const std::vector<CheckRow>& rows);

}  // namespace nfmusic
