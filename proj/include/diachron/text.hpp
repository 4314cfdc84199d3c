#pragma once
// Title tokenization for term scoring.

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace diachron {

using StopwordSet = std::unordered_set<std::string>;

// Small English function-word list plus tokens that appear in venue titles
// regardless of topic ("journal", "international", "review", ...).
const StopwordSet& default_stopwords();

// One lowercase word per line; blank lines and '#' comments ignored.
StopwordSet load_stopwords(const std::string& path);

// Lowercases ASCII letters, treats every non-alphanumeric byte as a separator
// and drops stopwords. Bytes >= 0x80 are kept so UTF-8 words survive intact.
std::vector<std::string> tokenize_title(std::string_view title, const StopwordSet& stopwords = default_stopwords());

}  // namespace diachron
