#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "subg/certificate.hpp"
#include "subg/deviation.hpp"
#include "subg/oracle.hpp"
#include "subg/transform.hpp"

namespace subg {

using Json = nlohmann::json;

// Certificates serialize as {"kind", "sigma_sq", "log_rho"}. A degenerate
// even-moment prefactor (ln rho = -infinity) crosses JSON as null.
Json to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

// Models serialize as {"family", ...family parameters}.
Json to_json(const DistributionModel& model);
DistributionModel model_from_json(const Json& j);

Json to_json(const BoundReport& report);
Json to_json(const std::vector<BoundReport>& curve);
Json to_json(const VerificationReport& report);
Json to_json(const ConversionPath& path);
Json to_json(const CenteringResult& result);

} // namespace subg
