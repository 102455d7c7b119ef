#include "darkpoint/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace darkpoint {

namespace {

constexpr char kMagic[4] = {'H', 'M', 'A', 'P'};
// Guards against absurd allocations from corrupt headers.
constexpr uint64_t kMaxPixels = 100'000'000;

void put_u16(std::string& out, uint16_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

uint16_t get_u16(const unsigned char* p) { return uint16_t(p[0] | (p[1] << 8)); }

uint32_t get_u32(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    return v;
}

uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    return v;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), std::streamsize(contents.size()));
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                      "': " + ec.message());
}

void write_hmap(const std::filesystem::path& path, const HeatmapF& h) {
    std::string buf;
    buf.reserve(kHmapHeaderBytes + size_t(h.size()) * 4);
    buf.append(kMagic, 4);
    put_u16(buf, kHmapVersion);
    put_u32(buf, uint32_t(h.width()));
    put_u32(buf, uint32_t(h.height()));
    put_u64(buf, std::bit_cast<uint64_t>(h.lambda().value()));
    const float* data = h.grid().data();  // row-major
    for (Index i = 0; i < h.size(); ++i) put_u32(buf, std::bit_cast<uint32_t>(data[i]));
    write_file_atomic(path, buf);
}

HeatmapF read_hmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < kHmapHeaderBytes)
        throw FormatError("truncated header in '" + path.string() + "'");
    if (std::memcmp(p, kMagic, 4) != 0)
        throw FormatError("bad magic in '" + path.string() + "'");
    const uint16_t version = get_u16(p + 4);
    if (version != kHmapVersion)
        throw FormatError("unsupported format version " + std::to_string(version) + " in '" +
                          path.string() + "'");
    const uint32_t w = get_u32(p + 6);
    const uint32_t h = get_u32(p + 10);
    const double lambda = std::bit_cast<double>(get_u64(p + 14));
    if (w < 3 || h < 3 || uint64_t(w) * h > kMaxPixels)
        throw FormatError("implausible dimensions " + std::to_string(w) + "x" +
                          std::to_string(h) + " in '" + path.string() + "'");
    if (!std::isfinite(lambda) || lambda <= 0.0)
        throw FormatError("invalid downsample ratio in '" + path.string() + "'");

    const size_t expected = kHmapHeaderBytes + size_t(w) * h * 4;
    if (bytes.size() < expected)
        throw FormatError("truncated payload in '" + path.string() + "'");
    if (bytes.size() > expected)
        throw FormatError("trailing bytes in '" + path.string() + "'");

    const Index rows = Index(h), cols = Index(w);
    HeatmapF::Grid grid(rows, cols);
    float* out = grid.data();
    const unsigned char* cursor = p + kHmapHeaderBytes;
    for (size_t i = 0; i < size_t(w) * h; ++i, cursor += 4)
        out[i] = std::bit_cast<float>(get_u32(cursor));
    return HeatmapF(std::move(grid), DownsampleRatio(lambda));
}

}  // namespace darkpoint
