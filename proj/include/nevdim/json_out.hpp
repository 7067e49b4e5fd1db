#pragma once

#include <string>

#include <json.hpp>

#include "nevdim/census.hpp"
#include "nevdim/config.hpp"
#include "nevdim/covers.hpp"
#include "nevdim/dimension.hpp"
#include "nevdim/ode.hpp"

namespace nevdim {

using Json = nlohmann::ordered_json;

/// Indented JSON with every float printed by %.17g; NaN and infinities
/// become null. Key order is insertion order.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const FitReport& fit);
Json to_json(const AnnulusCheck& a);
/// Fits, counts and flags of a census; the records themselves go to CSV.
Json census_summary(const Census& census);
Json to_json(const CheckReport& r);
Json to_json(const AsymptoticReport& r);
Json to_json(const McMullenEstimate& e);
Json to_json(const BoxCountReport& b);
Json to_json(const DimensionReport& r);
Json to_json(const RunConfig& cfg);

}  // namespace nevdim
