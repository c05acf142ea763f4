#pragma once

#include "brn/critical.hpp"
#include "brn/domain.hpp"
#include "brn/pohozaev.hpp"
#include "brn/predictor.hpp"

#include <nlohmann/json_fwd.hpp>

namespace brn {

/// DomainSpec wire format:
///   {"dimension": n, "shape": {"type": "ball" | "disjoint_balls" | "smooth", ...}}
DomainSpec domain_from_json(const nlohmann::json& j);
nlohmann::json domain_to_json(const DomainSpec& spec);
DomainSpec load_domain(const std::string& path);

nlohmann::json to_json(const CriticalPoint& cp);
nlohmann::json to_json(const CountReport& report);
nlohmann::json to_json(const IdentityResidual& r);
nlohmann::json to_json(const BlowupPrediction& pred);

}  // namespace brn
