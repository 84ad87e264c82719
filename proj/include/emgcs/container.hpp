#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace emgcs::container {

// Shared on-disk container: magic(8) | version(u32) | header_len(u64) |
// header JSON | blob_count(u64) | f64 blob (little-endian) | crc32(u32).
// The checksum covers everything before it.

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t crc = 0);

void write_file(const std::filesystem::path& path, const char magic[8],
                std::uint32_t version, const std::string& header_json,
                const std::vector<double>& blob);

struct Loaded {
    std::uint32_t version = 0;
    std::string header_json;
    std::vector<double> blob;
};

// Throws ParseError on wrong magic, VersionError on unsupported versions and
// ChecksumError on truncation or checksum mismatch.
Loaded read_file(const std::filesystem::path& path, const char magic[8],
                 std::uint32_t max_supported_version);

}  // namespace emgcs::container
