#pragma once
// Line-oriented "key = value" configuration text.

#include <string>
#include <utility>
#include <vector>

namespace diachron {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Keeps file order and repeated keys. Blank lines and text after '#' are
// ignored; throws PreconditionError (with the line number) on a line
// without '='.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

std::size_t to_size(const std::string& key, const std::string& value);
double to_double(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);

}  // namespace diachron
