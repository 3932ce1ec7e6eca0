#pragma once

#include <string>
#include <vector>

#include "lattice_smooth/experiment.hpp"

#include <nlohmann/json.hpp>

namespace latsm {

/// CLI driver behind the `lattice-smooth` binary. Subcommands: simulate,
/// estimate, bias, variance, rates, conditions, orlicz. Exit codes: 0 on
/// success, 1 on validation/usage errors, 2 when a study verdict is FAIL.
int cli_main(const std::vector<std::string>& args);

nlohmann::ordered_json rate_report_json(const RateReport& report);
nlohmann::ordered_json bias_report_json(const BiasReport& report);
nlohmann::ordered_json variance_report_json(const VarianceReport& report);
nlohmann::ordered_json condition_report_json(const ConditionReport& report);

} // namespace latsm
