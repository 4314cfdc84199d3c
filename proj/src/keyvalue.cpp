#include "diachron/keyvalue.hpp"

#include <fstream>
#include <sstream>

#include "diachron/errors.hpp"
#include "tsv.hpp"

namespace diachron {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw PreconditionError("config line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    return out;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

std::size_t to_size(const std::string& key, const std::string& value) {
    auto v = detail::parse_int<std::size_t>(value);
    if (!v) throw PreconditionError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
    return *v;
}

double to_double(const std::string& key, const std::string& value) {
    auto v = detail::parse_double(value);
    if (!v) throw PreconditionError("config key '" + key + "': expected a number, got '" + value + "'");
    return *v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw PreconditionError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace diachron
