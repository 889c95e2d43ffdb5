#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace splatcolor {

// key = value settings file. '#' starts a comment line, blank lines are
// skipped, keys and values are trimmed. Malformed lines raise ConfigError
// with the line number.
class Config {
public:
    Config() = default;
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    // Typed getters fall back to the default when the key is absent and raise
    // ConfigError (naming the key) when the stored text does not parse.
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    uint64_t get_u64(const std::string& key, uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    // FNV-1a over the sorted key=value lines; stable across runs and platforms.
    uint64_t hash() const;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace splatcolor
