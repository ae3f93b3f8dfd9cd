#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tvdm::cli {

struct KeySpec {
    std::string key;
    std::string default_value;
    std::string help;
};

// Keys accepted by a subcommand, with their desk-scale defaults. Throws ConfigError for an unknown command.
const std::vector<KeySpec>& keys_for(const std::string& command);
std::vector<std::string> commands();

// Resolved key=value configuration of one subcommand. Later sources override earlier ones:
// defaults, --paper-scale preset, config file, command-line flags and overrides.
class RunConfig {
public:
    explicit RunConfig(std::string command);

    const std::string& command() const { return command_; }
    // Throws ConfigError naming the key when it is not accepted by this command.
    void set(const std::string& key, const std::string& value);
    // "key=value" lines; blank lines and '#' comments allowed.
    void load_file(const std::filesystem::path& file);
    void apply_paper_scale();

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    // Comma-separated list.
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<std::size_t> get_size_list(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    // Sorted "key=value" lines; loading this text back reproduces the configuration.
    std::string canonical() const;
    // 16 hex digits of FNV-1a over the command name and canonical text.
    std::string hash() const;

private:
    std::string command_;
    std::map<std::string, std::string> values_;
};

}  // namespace tvdm::cli
