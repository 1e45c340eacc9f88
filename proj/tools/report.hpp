#pragma once

#include <string>

#include <json.hpp>

#include "jetinv/invariants.hpp"
#include "jetinv/transform.hpp"

namespace jetinv::cli {

using Json = nlohmann::ordered_json;

std::string point_string(const JetPoint &p);
Json point_json(const JetPoint &p);

Json verdict_json(const ZeroVerdict &v);
Json plan_json(const SamplePlan &plan);

/// Stable layout: equation, verdicts {W, C, K0, K1, I, J}, classification,
/// plan, residuals.
Json report_json(const InvariantReport &r);
std::string report_text(const InvariantReport &r);

Json check_json(const InvarianceCheck &c, const std::string &map_name);
std::string check_text(const InvarianceCheck &c, const std::string &map_name);

} // namespace jetinv::cli
