#pragma once

// Binary cache for omega tables.
//
// Layout (little-endian):
//   bytes 0..3   magic "EKW1"
//   byte  4      format version (1)
//   bytes 5..12  limit, uint64
//   bytes 13..20 cutoff, uint64 (0 means no cutoff)
//   then one byte per integer 1..limit
//
// A SHA-256 digest of the whole file is kept in a sidecar "<file>.sha256" and
// checked on load when present.

#include <filesystem>
#include <optional>
#include <string>

#include "eklab/prime_core.hpp"

namespace eklab {

inline constexpr char kCacheMagic[4] = {'E', 'K', 'W', '1'};
inline constexpr std::uint8_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderBytes = 21;

/// Writes the cache file and its digest sidecar; returns the hex digest.
std::string save_omega_cache(const OmegaTable& table, const std::filesystem::path& path);

/// Throws IntegrityError on wrong magic/version, a size mismatch, or a digest
/// that disagrees with `expected_digest` (or with the sidecar when no digest
/// is given).
OmegaTable load_omega_cache(const std::filesystem::path& path,
                            const std::optional<std::string>& expected_digest = std::nullopt);

std::string sha256_file(const std::filesystem::path& path);

std::filesystem::path omega_cache_path(const std::filesystem::path& dir, std::uint64_t limit,
                                       std::optional<std::uint64_t> cutoff);

}  // namespace eklab
