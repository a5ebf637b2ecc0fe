#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lsw {

/// Flat `key=value` configuration file.
///
/// Grammar: one assignment per line, `#` starts a comment, surrounding
/// whitespace is trimmed, blank lines are skipped. Keys are case sensitive
/// and may not repeat. Values are kept as strings; typed accessors throw
/// ConfigError naming the key on conversion failure.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<stream>");
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void erase(const std::string& key) { values_.erase(key); }

    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;

    /// Keys not listed in `known`, in sorted order.
    std::vector<std::string> unknown_keys(const std::set<std::string>& known) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Writes entries sorted by key; the output re-parses to an equal config.
    void write(std::ostream& out) const;

    bool operator==(const KeyValueConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

/// Parses a comma separated list of reals; throws ConfigError.
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

/// Parses `lo:hi:step` (inclusive); throws ConfigError.
struct IntRange {
    int lo = 0;
    int hi = 0;
    int step = 1;
    std::vector<int> values() const;
};
IntRange parse_range(const std::string& text, const std::string& what);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double value);

} // namespace lsw
