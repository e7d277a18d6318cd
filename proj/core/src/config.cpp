#include "phasemap/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "phasemap/errors.hpp"

namespace phasemap {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value)
{
    throw ConfigurationError("invalid value '" + value + "' for key '" + key + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text)
{
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError("config line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigurationError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void KeyValueConfig::merge(const KeyValueConfig& overrides)
{
    for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const char* begin = it->second.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE) bad_value(key, it->second);
    return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const char* begin = it->second.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) bad_value(key, it->second);
    return v;
}

unsigned long long KeyValueConfig::get_uint(const std::string& key,
                                            unsigned long long fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const char* begin = it->second.c_str();
    char* end = nullptr;
    errno = 0;
    if (it->second.find('-') != std::string::npos) bad_value(key, it->second);
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) bad_value(key, it->second);
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v);
}

std::string KeyValueConfig::to_text() const
{
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    return os.str();
}

}  // namespace phasemap
