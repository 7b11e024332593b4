#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace resflow {

// Parsed and validated run configuration: the command plus its key-value
// parameters (section headers namespace keys as "section.key"). Values keep
// their canonical text form; typed accessors parse on demand.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> values;

    bool operator==(const RunConfig&) const = default;
};

// Commands the tool understands; each has a fixed key schema.
const std::vector<std::string>& known_commands();

// Parses the documented key-value format and validates against the command's
// schema: unknown keys, missing required keys, type errors and range errors
// are all reported with the offending key (and line for parse errors). When
// `command` is empty the document must carry a `command = ...` line.
RunConfig parse_config(const std::string& text, const std::string& command = "");

// Canonical rendering; parse_config(render_config(cfg)) == cfg.
std::string render_config(const RunConfig& cfg);

bool cfg_has(const RunConfig& cfg, const std::string& key);
double cfg_double(const RunConfig& cfg, const std::string& key,
                  std::optional<double> fallback = {});
long cfg_long(const RunConfig& cfg, const std::string& key, std::optional<long> fallback = {});
bool cfg_bool(const RunConfig& cfg, const std::string& key, std::optional<bool> fallback = {});
std::string cfg_string(const RunConfig& cfg, const std::string& key,
                       std::optional<std::string> fallback = {});
std::vector<double> cfg_double_list(const RunConfig& cfg, const std::string& key,
                                    std::optional<std::vector<double>> fallback = {});
std::vector<long> cfg_long_list(const RunConfig& cfg, const std::string& key,
                                std::optional<std::vector<long>> fallback = {});
// Architecture pairs rendered as "T:L" entries, e.g. "1:4,1:8".
std::vector<std::pair<double, int>> cfg_archs(const RunConfig& cfg, const std::string& key,
                                              std::optional<std::string> fallback = {});

}  // namespace resflow
