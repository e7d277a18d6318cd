#pragma once

#include <map>
#include <string>

namespace phasemap {

/// Flat `key = value` text, one pair per line, `#` starts a comment.
/// Later assignments win, so overrides are applied by merging on top.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void merge(const KeyValueConfig& overrides);

    bool contains(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    unsigned long long get_uint(const std::string& key, unsigned long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace phasemap
