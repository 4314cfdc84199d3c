#include "diachron/types.hpp"

#include "diachron/errors.hpp"

namespace diachron {

char area_code(Area a) noexcept {
    switch (a) {
        case Area::Physical: return 'P';
        case Area::Life: return 'L';
        case Area::Health: return 'H';
        case Area::Social: return 'S';
    }
    return '?';
}

std::optional<Area> area_from_code(char c) noexcept {
    switch (c) {
        case 'P': return Area::Physical;
        case 'L': return Area::Life;
        case 'H': return Area::Health;
        case 'S': return Area::Social;
        default: return std::nullopt;
    }
}

std::string AreaSet::to_string() const {
    std::string out;
    for (Area a : kAllAreas) {
        if (!contains(a)) continue;
        if (!out.empty()) out += ';';
        out += area_code(a);
    }
    return out;
}

AreaSet AreaSet::parse(std::string_view text) {
    AreaSet set;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view item = text.substr(pos, end - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            auto area = item.size() == 1 ? area_from_code(item[0]) : std::nullopt;
            if (!area) throw PreconditionError("unknown area code '" + std::string(item) + "'");
            set.insert(*area);
        }
        pos = end + 1;
    }
    return set;
}

ParseError::ParseError(std::string path, std::size_t line, const std::string& what)
    : Error(path + ":" + std::to_string(line) + ": " + what), path_(std::move(path)), line_(line) {}

}  // namespace diachron
