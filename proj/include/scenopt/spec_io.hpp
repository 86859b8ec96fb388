#pragma once

#include "scenopt/bounds.hpp"
#include "scenopt/discard.hpp"
#include "scenopt/program.hpp"
#include "scenopt/validate.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

// JSON program specs (see docs/schema.md) and JSON renderings of results.
// Schema problems raise ConfigError.
namespace scenopt::io {

using Json = nlohmann::ordered_json;

struct SpecFile {
    std::string name;
    ScenarioProgram program;
    std::optional<double> theta_total;
    std::optional<bounds::Policy> policy;
    std::vector<std::uint64_t> discard;  // per stage, from the optional "discard" keys
};

SpecFile parse_spec(const Json& doc);
SpecFile load_spec(const std::string& path);

Json to_json(const bounds::SampleSizePlan& plan);
Json to_json(const Solution& solution);
Json to_json(const validate::ViolationEstimate& estimate);
Json to_json(const StageSets& sets);

}  // namespace scenopt::io
