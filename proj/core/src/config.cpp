#include "lsw/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lsw/error.hpp"

namespace lsw {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    double value = 0.0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (t.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(what + ": not a number: '" + text + "'");
    return value;
}

long long to_int(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    long long value = 0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (t.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(what + ": not an integer: '" + text + "'");
    return value;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin)
{
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.has(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_.emplace(std::move(key), std::move(value));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text)
{
    std::istringstream in(text);
    return parse(in, "<string>");
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, path.string());
}

std::string KeyValueConfig::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const { return to_double(get(key), key); }

long long KeyValueConfig::get_int(const std::string& key) const { return to_int(get(key), key); }

bool KeyValueConfig::get_bool(const std::string& key) const
{
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const
{
    return parse_double_list(get(key), key);
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key) const
{
    std::vector<int> out;
    for (double v : parse_double_list(get(key), key)) {
        if (v != static_cast<int>(v))
            throw ConfigError(key + ": expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::set<std::string>& known) const
{
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (!known.count(key))
            out.push_back(key);
    return out;
}

void KeyValueConfig::write(std::ostream& out) const
{
    for (const auto& [key, value] : values_)
        out << key << '=' << value << '\n';
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    if (trim(text).empty())
        return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(item, what));
    return out;
}

std::vector<int> IntRange::values() const
{
    std::vector<int> out;
    for (int v = lo; v <= hi; v += step)
        out.push_back(v);
    return out;
}

IntRange parse_range(const std::string& text, const std::string& what)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() != 2 && parts.size() != 3)
        throw ConfigError(what + ": expected lo:hi[:step], got '" + text + "'");
    IntRange r;
    r.lo = static_cast<int>(to_int(parts[0], what));
    r.hi = static_cast<int>(to_int(parts[1], what));
    r.step = parts.size() == 3 ? static_cast<int>(to_int(parts[2], what)) : 1;
    if (r.step <= 0)
        throw ConfigError(what + ": step must be positive");
    return r;
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

} // namespace lsw
