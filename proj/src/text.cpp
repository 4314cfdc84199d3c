#include "diachron/text.hpp"

#include <fstream>

#include "diachron/errors.hpp"

namespace diachron {

const StopwordSet& default_stopwords() {
    static const StopwordSet words = {
        "a",       "an",        "and",         "as",        "at",       "by",      "de",       "der",
        "des",     "die",       "du",          "et",        "for",      "from",    "in",       "into",
        "la",      "le",        "of",          "on",        "or",       "the",     "to",       "und",
        "with",    "journal",   "journals",    "international", "review", "reviews", "proceedings",
        "annual",  "acta",      "bulletin",    "transactions", "letters", "research", "studies",
        "science", "sciences",  "annals",      "archives",  "reports",  "advances", "society",
        "conference", "symposium", "workshop", "american",  "european", "new",      "quarterly",
        "current", "applied",   "ieee",        "acm",
    };
    return words;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open stopword file " + path);
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        for (auto& tok : tokenize_title(line, {})) out.insert(std::move(tok));
    }
    return out;
}

std::vector<std::string> tokenize_title(std::string_view title, const StopwordSet& stopwords) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords.contains(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : title) {
        if (c >= 'A' && c <= 'Z') {
            cur += static_cast<char>(c - 'A' + 'a');
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            cur += static_cast<char>(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace diachron
