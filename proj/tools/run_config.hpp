#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dv::cli {

enum class ParamKind { Number, Integer, String, Boolean };

struct ParamSpec {
    std::string key;  // snake_case; the flag is the kebab-case mirror
    ParamKind kind;
    nlohmann::json default_value;  // discarded(): required; null: optional without default
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;  // includes output_dir and seed
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec& find_command(const std::string& name);

std::string kebab(const std::string& key);

struct RunConfig {
    std::string command;
    nlohmann::json params;  // every key of the command, resolved and typed
    std::string output_dir;
    std::uint64_t seed = 0;

    double number(const std::string& key) const;
    std::optional<double> optional_number(const std::string& key) const;
    long long integer(const std::string& key) const;
    const std::string& string(const std::string& key) const;
    bool boolean(const std::string& key) const;
};

// Defaults, then the config file's flat keys, then flags (raw text keyed by snake_case).
RunConfig resolve(const CommandSpec& spec, const nlohmann::json& file,
                  const std::map<std::string, std::string>& flags);

}  // namespace dv::cli
