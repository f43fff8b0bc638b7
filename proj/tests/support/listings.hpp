#pragma once

#include <string>

#include "alurity/model/scenario.hpp"

namespace alurity::testing {

/// Absolute path of a file under tests/fixtures.
std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

/// Field-for-field values of the three reference listings.
Scenario expected_listing1();
Scenario expected_listing2();
Flow expected_listing3();

/// Listing 1 with Listing 2's VM appended.
Scenario merged_listing12();

ModuleRef ref(const std::string& text);

} // namespace alurity::testing
