#include "afv/flo_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "io_util.hpp"

namespace afv {

namespace {

constexpr float kFloTag = 202021.25f;  // "PIEH" in little-endian bytes
constexpr int kMaxDim = 99999;

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
    if (flow.empty()) throw ValidationError("write_flo: empty flow field");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(12 + static_cast<std::size_t>(flow.width()) * flow.height() * 8);
    put_u32_le(bytes, std::bit_cast<std::uint32_t>(kFloTag));
    put_u32_le(bytes, static_cast<std::uint32_t>(flow.width()));
    put_u32_le(bytes, static_cast<std::uint32_t>(flow.height()));
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            put_u32_le(bytes, std::bit_cast<std::uint32_t>(flow.u(x, y)));
            put_u32_le(bytes, std::bit_cast<std::uint32_t>(flow.v(x, y)));
        }
    }
    detail::atomic_write_bytes(path, bytes);
}

FlowField read_flo(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open flow file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 12) {
        throw IoError("flow file too short for header: " + path.string() + " (" +
                      std::to_string(bytes.size()) + " bytes)");
    }
    const float tag = std::bit_cast<float>(get_u32_le(bytes.data()));
    if (tag != kFloTag) {
        throw IoError("wrong .flo magic in " + path.string() +
                      " (file may be corrupt or big-endian)");
    }
    const std::int32_t width = static_cast<std::int32_t>(get_u32_le(bytes.data() + 4));
    const std::int32_t height = static_cast<std::int32_t>(get_u32_le(bytes.data() + 8));
    if (width < 1 || width > kMaxDim || height < 1 || height > kMaxDim) {
        throw IoError("illegal .flo dimensions " + std::to_string(width) + "x" +
                      std::to_string(height) + " in " + path.string());
    }
    const std::size_t expected =
        12 + static_cast<std::size_t>(width) * height * 2 * sizeof(float);
    if (bytes.size() != expected) {
        throw IoError("truncated .flo payload in " + path.string() + ": expected " +
                      std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
    }
    FlowField flow(width, height);
    const std::uint8_t* p = bytes.data() + 12;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            flow.u(x, y) = std::bit_cast<float>(get_u32_le(p));
            flow.v(x, y) = std::bit_cast<float>(get_u32_le(p + 4));
            p += 8;
        }
    }
    return flow;
}

std::vector<FlowField> read_flo_sequence(const std::filesystem::path& dir,
                                         const std::string& pattern) {
    const auto paths = detail::list_sequence(dir, detail::SequencePattern::parse(pattern));
    if (paths.empty()) {
        throw IoError("no flow files matching '" + pattern + "' in " + dir.string());
    }
    std::vector<FlowField> flows;
    flows.reserve(paths.size());
    for (const auto& p : paths) flows.push_back(read_flo(p));
    return flows;
}

void write_flo_sequence(const std::vector<FlowField>& flows,
                        const std::filesystem::path& dir, const std::string& pattern) {
    if (flows.empty()) throw ValidationError("write_flo_sequence: no flow fields");
    const auto pat = detail::SequencePattern::parse(pattern);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < flows.size(); ++i) {
        write_flo(flows[i], dir / pat.name(static_cast<int>(i)));
    }
}

}  // namespace afv
