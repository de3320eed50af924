#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace marginlab {

struct ConfigKey {
    std::string name;  // dotted, e.g. "net.lambda"
    std::string default_value;
    std::string help;
};

// Flat key=value configuration over a fixed key registry. Every layer
// (defaults, preset, file, command line) writes through set(), which rejects
// unknown keys with ConfigError; later layers overwrite earlier ones.
class ExperimentConfig {
public:
    ExperimentConfig();  // all registered keys at their defaults

    static const std::vector<ConfigKey>& registry();
    static bool known(std::string_view key);

    void set(const std::string& key, const std::string& value);
    // Lines "key = value"; '#' starts a comment; blank lines ignored.
    void load_text(const std::string& text, const std::string& origin = "<text>");
    void load_file(const std::filesystem::path& path);
    void apply_preset(std::string_view name);
    static std::vector<std::string> preset_names();

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    // Comma-separated numbers.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::size_t> get_sizes(const std::string& key) const;

    // Sorted "key=value\n" lines; the archived snapshot of a run.
    std::string serialize() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace marginlab
