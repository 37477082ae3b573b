#pragma once

#include "orderbench/provider.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

namespace orderbench {

// Content-addressed completion store: one file per request fingerprint under
// a directory. Writes go through temp-file + rename, so a reader sees either
// nothing or a whole entry. Each entry carries a digest of its payload; an
// entry that fails the check is reported as a miss and counted as corrupt.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<ModelResponse> get(const std::string& fingerprint) const;
    void put(const std::string& fingerprint, const ModelResponse& response);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::size_t corrupt_reads() const noexcept { return corrupt_.load(); }

    std::filesystem::path path_for(const std::string& fingerprint) const;

private:
    std::filesystem::path dir_;
    mutable std::atomic<std::size_t> corrupt_{0};
};

} // namespace orderbench
