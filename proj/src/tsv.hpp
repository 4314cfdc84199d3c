#pragma once
// Line-oriented TSV reading shared by the table loaders.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diachron/errors.hpp"

namespace diachron::detail {

inline std::vector<std::string_view> split(std::string_view line, char sep = '\t') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t end = line.find(sep, pos);
        if (end == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, end - pos));
        pos = end + 1;
    }
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    Int value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return v;
}

// Iterates the data rows of a TSV file after checking its header.
class TsvReader {
public:
    TsvReader(const std::string& path, std::string_view expected_header) : path_(path), in_(path) {
        if (!in_) throw IntegrityError("cannot open " + path);
        std::string header;
        if (!std::getline(in_, header)) throw ParseError(path_, 1, "missing header row");
        strip_cr(header);
        if (header != expected_header)
            throw ParseError(path_, 1,
                             "unexpected header '" + header + "', expected '" + std::string(expected_header) + "'");
        line_no_ = 1;
    }

    // Next non-empty row, or false at end of file.
    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            strip_cr(line_);
            if (line_.empty()) continue;
            fields = split(line_);
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }
    const std::string& path() const noexcept { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_no_, what); }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    }

    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
};

}  // namespace diachron::detail
