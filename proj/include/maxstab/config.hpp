#pragma once
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxstab/censor.hpp"
#include "maxstab/coupling.hpp"

namespace maxstab {

using Json = nlohmann::json;

// Schema violation; `where` is a path such as $.set.intervals[1][0].
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

const std::vector<std::string>& subcommands();

// JSON Schema (draft-07 subset) per subcommand.
Json schema_for(const std::string& command);
Json all_schemas();

// Supports type, properties, required, additionalProperties=false, items,
// minItems/maxItems, minimum/maximum/exclusiveMinimum, enum, const, oneOf and
// local $ref into #/definitions.
void validate(const Json& value, const Json& schema);

// Set descriptors. Random sets (subordinator) draw from `seed`; file paths are
// relative to `base`.
CensorSet set_from_json(const Json& desc, std::uint64_t seed, const std::filesystem::path& base,
                        const std::string& where = "$.set");

Interval interval_from_json(const Json& j);
MatchConfig match_from_json(const Json& j);
LadderProtocol ladder_from_json(const Json& j, std::uint64_t seed);

// FNV-1a over the canonical dump (sorted keys), seed included.
std::string config_hash(const Json& config);

}  // namespace maxstab
