#pragma once

#include <string>

#include <json.hpp>

#include "wfusion/fusion.hpp"
#include "wfusion/pipeline.hpp"

// JSON and CSV views of the report types. All numbers are rounded to 15
// significant digits so runs can be diffed across implementations; the CSV
// and JSON forms of the same report carry identical values.

namespace wfusion {

using ordered_json = nlohmann::ordered_json;

// Nearest double to the 15-significant-digit decimal form of v.
double round15(double v);

// {"groups": [...], "slots": [...], "terms": [{"pattern": "01|g", ...}]}
// where the pattern lists group excitation bits, then '|', then one g/e
// character per extracted slot.
ordered_json state_to_json(const CompactFusionState& state);

ordered_json report_to_json(const BranchReport& report);
std::string report_to_csv(const BranchReport& report);

ordered_json yield_to_json(const YieldStats& ys);

ordered_json feasibility_to_json(const FeasibilityReport& r);
std::string feasibility_to_csv(const FeasibilityReport& r);

}  // namespace wfusion
