#pragma once
// Shared fixtures for the unit tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "diachron/embedding.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        for (;;) {
            path_ = std::filesystem::temp_directory_path() / ("diachron-test-" + std::to_string(rd()));
            if (std::filesystem::create_directory(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string write_text(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

using Row = std::pair<std::uint64_t, std::vector<float>>;

inline diachron::EpochEmbedding embedding(const std::string& label, const std::vector<Row>& rows) {
    std::vector<diachron::VenueId> ids;
    std::vector<float> data;
    const std::size_t dim = rows.empty() ? 0 : rows.front().second.size();
    for (const auto& [id, v] : rows) {
        ids.push_back(diachron::VenueId{id});
        data.insert(data.end(), v.begin(), v.end());
    }
    return {label, std::move(ids), dim, std::move(data)};
}

// Gaussian vectors with ids 1..n.
inline diachron::EpochEmbedding random_embedding(const std::string& label, std::size_t n, std::size_t dim,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<diachron::VenueId> ids;
    std::vector<float> data(n * dim);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(diachron::VenueId{i + 1});
    for (auto& x : data) x = g(rng);
    return {label, std::move(ids), dim, std::move(data)};
}

}  // namespace testing
