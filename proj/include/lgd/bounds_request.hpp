#pragma once

#include <string>

#include "lgd/theory.hpp"

namespace lgd {

/// Evaluates {"formula": ..., "inputs": {...}} and returns the BoundResult as JSON.
/// Formulas: wasserstein, ula_params, empmean, pdim, task_count, hoeffding,
/// bernstein, erm_bayes_budget. Throws ParseError or ConfigError on bad requests.
std::string evaluate_bounds_json(const std::string& request);

BoundResult evaluate_bound(const std::string& formula, const std::string& inputs_json);

}  // namespace lgd
