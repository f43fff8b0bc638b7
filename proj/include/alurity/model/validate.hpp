#pragma once

#include <vector>

#include "alurity/model/diagnostic.hpp"
#include "alurity/model/scenario.hpp"

namespace alurity {

/// Reports every semantic violation in `scenario`, errors and warnings alike,
/// ordered by document position and then by code. An empty result means the
/// scenario is runnable.
std::vector<Diagnostic> validate(const Scenario& scenario);

/// Names accepted for networks, endpoints and windows.
bool is_valid_identifier(std::string_view name);

} // namespace alurity
