#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace diachron {

// Opaque identifiers. Scoped enums keep paper and venue ids from being mixed up
// while remaining hashable and totally ordered.
enum class PaperId : std::uint64_t {};
enum class VenueId : std::uint64_t {};

constexpr std::uint64_t raw(PaperId id) noexcept { return static_cast<std::uint64_t>(id); }
constexpr std::uint64_t raw(VenueId id) noexcept { return static_cast<std::uint64_t>(id); }

// Top-level subject areas. Declaration order is the tie-break order used
// wherever a single area must be picked among equally supported ones.
enum class Area : std::uint8_t { Physical = 0, Life = 1, Health = 2, Social = 3 };

inline constexpr Area kAllAreas[] = {Area::Physical, Area::Life, Area::Health, Area::Social};
inline constexpr Area kPoleAreas[] = {Area::Physical, Area::Life, Area::Health};

char area_code(Area a) noexcept;
std::optional<Area> area_from_code(char c) noexcept;

// Small set of areas stored as a bitmask.
class AreaSet {
public:
    constexpr AreaSet() = default;
    constexpr AreaSet(std::initializer_list<Area> areas) {
        for (Area a : areas) insert(a);
    }

    constexpr void insert(Area a) noexcept { bits_ |= bit(a); }
    constexpr bool contains(Area a) const noexcept { return (bits_ & bit(a)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr int size() const noexcept {
        int n = 0;
        for (Area a : kAllAreas) n += contains(a) ? 1 : 0;
        return n;
    }
    // First member in tie-break order; only meaningful when non-empty.
    constexpr Area first() const noexcept {
        for (Area a : kAllAreas)
            if (contains(a)) return a;
        return Area::Physical;
    }

    constexpr bool operator==(const AreaSet&) const = default;

    // "P;L" style encoding used by venues.tsv.
    std::string to_string() const;
    static AreaSet parse(std::string_view text);

private:
    static constexpr std::uint8_t bit(Area a) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(a));
    }
    std::uint8_t bits_ = 0;
};

// Inclusive year range labelled e.g. "1980s".
struct EpochSpec {
    std::string label;
    int start_year = 0;
    int end_year = 0;

    bool contains(int year) const noexcept { return start_year <= year && year <= end_year; }
    bool operator==(const EpochSpec&) const = default;
};

}  // namespace diachron
