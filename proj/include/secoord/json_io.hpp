#ifndef SECOORD_JSON_IO_HPP
#define SECOORD_JSON_IO_HPP

#include <json.hpp>

#include "secoord/adversary.hpp"
#include "secoord/pad.hpp"
#include "secoord/region.hpp"
#include "secoord/sim.hpp"

namespace secoord {

using json = nlohmann::json;

json to_json(const Alphabet& a);
json to_json(const JointDist& j);
json to_json(const Channel& c);
json to_json(const RatePoint& p);
json to_json(const SingleLetterStrategy& s);
json to_json(const BeliefStrategy& s);
json to_json(const SimReport& r);
json to_json(const PadReport& r);
json to_json(const SearchResult& r);
json to_json(const std::vector<Violation>& v);

Alphabet alphabet_from_json(const json& j);
JointDist joint_from_json(const json& j);
Channel channel_from_json(const json& j);

/// Config-level loaders; messages name the offending field.
SourceSpec source_from_json(const json& config);
PayoffFn payoff_from_json(const json& j, const Alphabet& x);
SchemeDist scheme_from_json(const json& config, const SourceSpec& src);
SchemeFactors factors_from_json(const json& j);
RateBudget budget_from_json(const json& j);
Rates rates_from_json(const json& j);
SearchConfig search_from_json(const json& j, std::uint64_t seed);

/// Field access that throws config_error naming the missing/ill-typed field.
const json& require_field(const json& j, const std::string& name);
double require_number(const json& j, const std::string& name);
std::uint64_t require_uint(const json& j, const std::string& name);

} // namespace secoord

#endif
