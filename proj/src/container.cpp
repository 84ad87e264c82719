#include "emgcs/container.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "emgcs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "container blobs are little-endian");

namespace emgcs::container {

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t crc) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    const auto* p = static_cast<const unsigned char*>(data);
    crc = ~crc;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return ~crc;
}

void write_file(const std::filesystem::path& path, const char magic[8],
                std::uint32_t version, const std::string& header_json,
                const std::vector<double>& blob) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());

    std::string buf;
    buf.append(magic, 8);
    auto append = [&buf](const void* p, std::size_t n) {
        buf.append(static_cast<const char*>(p), n);
    };
    append(&version, sizeof version);
    const std::uint64_t hlen = header_json.size();
    append(&hlen, sizeof hlen);
    buf += header_json;
    const std::uint64_t count = blob.size();
    append(&count, sizeof count);
    append(blob.data(), blob.size() * sizeof(double));

    const std::uint32_t crc = crc32(buf.data(), buf.size());
    append(&crc, sizeof crc);

    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + path.string());
}

Loaded read_file(const std::filesystem::path& path, const char magic[8],
                 std::uint32_t max_supported_version) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    auto take = [&](void* p, std::size_t n, const char* what) {
        if (pos + n > buf.size())
            throw ChecksumError(path.string() + ": truncated (" + what + ")");
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    };

    char got_magic[8];
    take(got_magic, 8, "magic");
    if (std::memcmp(got_magic, magic, 8) != 0)
        throw ParseError(path.string() + ": wrong file type");

    Loaded loaded;
    take(&loaded.version, sizeof loaded.version, "version");
    if (loaded.version == 0 || loaded.version > max_supported_version)
        throw VersionError(path.string() + ": file version " +
                           std::to_string(loaded.version) + ", this build supports <= " +
                           std::to_string(max_supported_version));

    std::uint64_t hlen = 0;
    take(&hlen, sizeof hlen, "header length");
    if (pos + hlen > buf.size())
        throw ChecksumError(path.string() + ": truncated (header)");
    loaded.header_json.assign(buf.data() + pos, hlen);
    pos += hlen;

    std::uint64_t count = 0;
    take(&count, sizeof count, "blob length");
    if (pos + count * sizeof(double) + sizeof(std::uint32_t) > buf.size())
        throw ChecksumError(path.string() + ": truncated (blob)");
    loaded.blob.resize(count);
    std::memcpy(loaded.blob.data(), buf.data() + pos, count * sizeof(double));
    pos += count * sizeof(double);

    std::uint32_t want_crc = 0;
    take(&want_crc, sizeof want_crc, "checksum");
    const std::uint32_t got_crc = crc32(buf.data(), pos - sizeof want_crc);
    if (got_crc != want_crc)
        throw ChecksumError(path.string() + ": checksum mismatch");
    if (pos != buf.size())
        throw ChecksumError(path.string() + ": trailing bytes");
    return loaded;
}

}  // namespace emgcs::container
