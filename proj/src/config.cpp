#include "resflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace resflow {

namespace {

enum class KeyType { number, integer, boolean, text, number_list, integer_list, arch_list };

struct KeySpec {
    const char* name;
    KeyType type;
    bool required = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = false;
};

// Keys accepted by every command.
const std::vector<KeySpec> kCommonKeys = {
    {"output_dir", KeyType::text},
    {"seed", KeyType::integer, false, 0},
};

const std::vector<KeySpec> kDatasetKeys = {
    {"dataset", KeyType::text},
    {"s_train", KeyType::integer, false, 1},
    {"s_test", KeyType::integer, false, 1},
    {"task_seed", KeyType::integer, false, 0},
    {"teacher_nd", KeyType::integer, false, 1},
    {"teacher_n", KeyType::integer, false, 1},
    {"teacher_m", KeyType::integer, false, 1},
    {"teacher_l", KeyType::integer, false, 1},
    {"teacher_t", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
    {"teacher_b_theta", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
    {"teacher_classify", KeyType::boolean},
    {"mixture_classes", KeyType::integer, false, 2},
    {"input_dim", KeyType::integer, false, 1},
    {"mixture_sigma", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
    {"moons_noise", KeyType::number, false, 0},
    {"images_path", KeyType::text},
    {"labels_path", KeyType::text},
    {"classes", KeyType::integer_list},
    {"per_class_limit", KeyType::integer, false, 0},
};

const std::vector<KeySpec> kTrainKeys = {
    {"lr", KeyType::number, false, 0},
    {"momentum", KeyType::number, false, 0, 1, false, true},
    {"epochs", KeyType::integer, false, 1},
    {"batch_size", KeyType::integer, false, 1},
    {"projection", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
    {"loss", KeyType::text},
    {"student_m", KeyType::integer, false, 1},
    {"window", KeyType::integer, false, 1},
    {"init_scale", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
    {"seeds", KeyType::integer_list},
};

std::vector<KeySpec> with_common(std::vector<KeySpec> keys,
                                 const std::vector<const std::vector<KeySpec>*>& extra = {}) {
    for (const auto* group : extra)
        keys.insert(keys.end(), group->begin(), group->end());
    keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
    return keys;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
    static const std::map<std::string, std::vector<KeySpec>> table = [] {
        std::map<std::string, std::vector<KeySpec>> t;
        t["catalog"] = with_common({
            {"name", KeyType::text, true},
            {"params", KeyType::number_list},
            {"grid_min", KeyType::number},
            {"grid_max", KeyType::number},
            {"grid_points", KeyType::integer, false, 2},
        });
        t["forward"] = with_common({
            {"params_file", KeyType::text},
            {"n_d", KeyType::integer, false, 1},
            {"n", KeyType::integer, false, 1},
            {"m", KeyType::integer, false, 1},
            {"l", KeyType::integer, false, 1},
            {"t", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"b_theta", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"input", KeyType::number_list, true},
            {"activation", KeyType::text},
            {"activation_params", KeyType::number_list},
        });
        t["flow"] = with_common({
            {"n_d", KeyType::integer, false, 1},
            {"n", KeyType::integer, false, 1},
            {"m", KeyType::integer, false, 1},
            {"t", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"modes", KeyType::integer, false, 1},
            {"b_theta", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"integrator", KeyType::text},
            {"steps", KeyType::integer, false, 1},
            {"input", KeyType::number_list, true},
            {"activation", KeyType::text},
            {"activation_params", KeyType::number_list},
        });
        t["rademacher"] = with_common({
            {"functions", KeyType::integer, false, 1},
            {"samples", KeyType::integer, true, 1, 24},
            {"scale", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"estimator", KeyType::text},
            {"draws", KeyType::integer, false, 100},
            {"activation", KeyType::text},
            {"activation_params", KeyType::number_list},
        });
        t["example33"] = with_common({
            {"s", KeyType::integer, true, 1, 20},
            {"eta", KeyType::number, true, 0, std::numeric_limits<double>::infinity(), true},
            {"gamma", KeyType::number, true, 0, std::numeric_limits<double>::infinity(), true},
            {"alpha", KeyType::number, true, 0, std::numeric_limits<double>::infinity(), true},
            {"beta", KeyType::number, true, 0, std::numeric_limits<double>::infinity(), true},
        });
        t["bounds"] = with_common({
            {"mode", KeyType::text, true},
            {"n", KeyType::integer, false, 1},
            {"n_d", KeyType::integer, false, 1},
            {"t", KeyType::number, false, 0},
            {"l", KeyType::integer, false, 1},
            {"s", KeyType::integer, true, 1},
            {"s_grid", KeyType::integer_list},
            {"delta", KeyType::number, true, 0, 1, true, true},
            {"b_theta", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"b_in", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"b_kappa", KeyType::number, false, 0},
            {"b_ell", KeyType::number, false, 0},
            {"activation", KeyType::text},
            {"activation_params", KeyType::number_list},
            {"c_slack", KeyType::number_list},
            {"convention", KeyType::text},
            {"clamp", KeyType::boolean},
        });
        t["gap-vs-s"] = with_common(
            {
                {"archs", KeyType::arch_list, true},
                {"s_grid", KeyType::integer_list, true},
            },
            {&kDatasetKeys, &kTrainKeys});
        t["depth"] = with_common(
            {
                {"t", KeyType::number, true, 0, std::numeric_limits<double>::infinity(), true},
                {"l_grid", KeyType::integer_list, true},
                {"init_b_theta", KeyType::number, false, 0,
                 std::numeric_limits<double>::infinity(), true},
            },
            {&kDatasetKeys, &kTrainKeys});
        t["activation-compare"] = with_common(
            {
                {"archs", KeyType::arch_list, true},
                {"slope_a", KeyType::number, false, 0,
                 std::numeric_limits<double>::infinity(), true},
                {"slope_b", KeyType::number, false, 0},
                {"alpha0", KeyType::number, false, 0},
                {"beta0", KeyType::number, false, 0},
                {"learnable", KeyType::boolean},
                {"late_window", KeyType::integer, false, 1},
            },
            {&kDatasetKeys, &kTrainKeys});
        t["convergence"] = with_common({
            {"n_d", KeyType::integer, false, 1},
            {"n", KeyType::integer, false, 1},
            {"m", KeyType::integer, false, 1},
            {"t", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"modes", KeyType::integer, false, 1},
            {"b_theta", KeyType::number, false, 0, std::numeric_limits<double>::infinity(), true},
            {"l_grid", KeyType::integer_list},
            {"n_inputs", KeyType::integer, false, 1},
            {"reference_steps", KeyType::integer, false, 2},
            {"subgrid", KeyType::integer, false, 1},
            {"activation", KeyType::text},
            {"activation_params", KeyType::number_list},
        });
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
    try {
        size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("key '" + key + "': cannot parse number from '" + raw + "'");
    }
}

long parse_integer(const std::string& key, const std::string& raw) {
    try {
        size_t used = 0;
        long v = std::stol(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("key '" + key + "': cannot parse integer from '" + raw +
                                    "'");
    }
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream stream(raw);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void check_range(const KeySpec& spec, const std::string& key, double v) {
    const bool lo_ok = spec.lo_open ? v > spec.lo : v >= spec.lo;
    const bool hi_ok = spec.hi_open ? v < spec.hi : v <= spec.hi;
    if (!lo_ok || !hi_ok)
        throw std::invalid_argument("key '" + key + "': value " + std::to_string(v) +
                                    " outside its admissible range");
}

void validate_value(const KeySpec& spec, const std::string& key, const std::string& raw) {
    switch (spec.type) {
        case KeyType::number:
            check_range(spec, key, parse_number(key, raw));
            break;
        case KeyType::integer:
            check_range(spec, key, static_cast<double>(parse_integer(key, raw)));
            break;
        case KeyType::boolean:
            if (raw != "true" && raw != "false")
                throw std::invalid_argument("key '" + key + "': expected true or false");
            break;
        case KeyType::text:
            break;
        case KeyType::number_list:
            for (const auto& item : split_list(raw)) check_range(spec, key, parse_number(key, item));
            break;
        case KeyType::integer_list:
            for (const auto& item : split_list(raw))
                check_range(spec, key, static_cast<double>(parse_integer(key, item)));
            break;
        case KeyType::arch_list:
            for (const auto& item : split_list(raw)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument("key '" + key + "': expected T:L entries");
                const double T = parse_number(key, trim(item.substr(0, colon)));
                const long L = parse_integer(key, trim(item.substr(colon + 1)));
                if (!(T > 0.0) || L < 1)
                    throw std::invalid_argument("key '" + key + "': need T > 0 and L >= 1");
            }
            break;
    }
}

const std::string& raw_value(const RunConfig& cfg, const std::string& key) {
    auto it = cfg.values.find(key);
    if (it == cfg.values.end())
        throw std::invalid_argument("missing key '" + key + "' for command '" + cfg.command +
                                    "'");
    return it->second;
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, schema] : schemas()) out.push_back(name);
        return out;
    }();
    return names;
}

RunConfig parse_config(const std::string& text, const std::string& command) {
    RunConfig cfg;
    std::string section;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    std::map<std::string, std::string> raw;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (raw.count(key))
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" +
                                        key + "'");
        raw[key] = value;
    }

    auto cmd_it = raw.find("command");
    if (cmd_it != raw.end()) {
        cfg.command = cmd_it->second;
        raw.erase(cmd_it);
        if (!command.empty() && command != cfg.command)
            throw std::invalid_argument("config declares command '" + cfg.command +
                                        "' but '" + command + "' was requested");
    } else {
        cfg.command = command;
    }
    if (cfg.command.empty())
        throw std::invalid_argument("no command given (pass one or add a command = line)");

    const auto schema_it = schemas().find(cfg.command);
    if (schema_it == schemas().end())
        throw std::invalid_argument("unknown command '" + cfg.command + "'");
    const auto& schema = schema_it->second;

    for (const auto& [key, value] : raw) {
        const auto spec = std::find_if(schema.begin(), schema.end(),
                                       [&](const KeySpec& s) { return key == s.name; });
        if (spec == schema.end())
            throw std::invalid_argument("unknown key '" + key + "' for command '" +
                                        cfg.command + "'");
        validate_value(*spec, key, value);
    }
    for (const auto& spec : schema) {
        if (spec.required && !raw.count(spec.name))
            throw std::invalid_argument("missing required key '" + std::string(spec.name) +
                                        "' for command '" + cfg.command + "'");
    }
    cfg.values = std::move(raw);
    return cfg;
}

std::string render_config(const RunConfig& cfg) {
    std::string out = "command = " + cfg.command + "\n";
    for (const auto& [key, value] : cfg.values) out += key + " = " + value + "\n";
    return out;
}

bool cfg_has(const RunConfig& cfg, const std::string& key) { return cfg.values.count(key) > 0; }

double cfg_double(const RunConfig& cfg, const std::string& key, std::optional<double> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    return parse_number(key, raw_value(cfg, key));
}

long cfg_long(const RunConfig& cfg, const std::string& key, std::optional<long> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    return parse_integer(key, raw_value(cfg, key));
}

bool cfg_bool(const RunConfig& cfg, const std::string& key, std::optional<bool> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    return raw_value(cfg, key) == "true";
}

std::string cfg_string(const RunConfig& cfg, const std::string& key,
                       std::optional<std::string> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    return raw_value(cfg, key);
}

std::vector<double> cfg_double_list(const RunConfig& cfg, const std::string& key,
                                    std::optional<std::vector<double>> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    std::vector<double> out;
    for (const auto& item : split_list(raw_value(cfg, key))) out.push_back(parse_number(key, item));
    return out;
}

std::vector<long> cfg_long_list(const RunConfig& cfg, const std::string& key,
                                std::optional<std::vector<long>> fallback) {
    if (!cfg_has(cfg, key) && fallback) return *fallback;
    std::vector<long> out;
    for (const auto& item : split_list(raw_value(cfg, key)))
        out.push_back(parse_integer(key, item));
    return out;
}

std::vector<std::pair<double, int>> cfg_archs(const RunConfig& cfg, const std::string& key,
                                              std::optional<std::string> fallback) {
    std::string raw;
    if (!cfg_has(cfg, key) && fallback)
        raw = *fallback;
    else
        raw = raw_value(cfg, key);
    std::vector<std::pair<double, int>> out;
    for (const auto& item : split_list(raw)) {
        const auto colon = item.find(':');
        out.emplace_back(parse_number(key, trim(item.substr(0, colon))),
                         static_cast<int>(parse_integer(key, trim(item.substr(colon + 1)))));
    }
    return out;
}

}  // namespace resflow
