#include "io_util.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace afv::detail {

SequencePattern SequencePattern::parse(const std::string& pattern) {
    const std::size_t pos = pattern.find('%');
    if (pos == std::string::npos) {
        throw ValidationError("file pattern must contain a %d placeholder: '" + pattern + "'");
    }
    SequencePattern p;
    p.prefix = pattern.substr(0, pos);
    std::size_t i = pos + 1;
    int digits = 0;
    if (i < pattern.size() && pattern[i] == '0') {
        ++i;
        while (i < pattern.size() && pattern[i] >= '0' && pattern[i] <= '9') {
            digits = digits * 10 + (pattern[i] - '0');
            ++i;
        }
    }
    if (i >= pattern.size() || pattern[i] != 'd') {
        throw ValidationError("file pattern placeholder must be %d or %0Nd: '" + pattern + "'");
    }
    p.min_digits = std::max(1, digits);
    p.suffix = pattern.substr(i + 1);
    if (p.suffix.find('%') != std::string::npos) {
        throw ValidationError("file pattern must contain exactly one placeholder: '" +
                              pattern + "'");
    }
    return p;
}

std::string SequencePattern::name(int index) const {
    std::string digits = std::to_string(index);
    if (static_cast<int>(digits.size()) < min_digits) {
        digits.insert(0, min_digits - digits.size(), '0');
    }
    return prefix + digits + suffix;
}

std::optional<int> SequencePattern::match(const std::string& filename) const {
    if (filename.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (filename.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0) {
        return std::nullopt;
    }
    const std::string digits =
        filename.substr(prefix.size(), filename.size() - prefix.size() - suffix.size());
    if (digits.empty()) return std::nullopt;
    long value = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + (c - '0');
        if (value > 1'000'000'000L) return std::nullopt;
    }
    return static_cast<int>(value);
}

std::vector<std::filesystem::path> list_sequence(const std::filesystem::path& dir,
                                                 const SequencePattern& pattern) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<int> indices;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (auto idx = pattern.match(entry.path().filename().string())) {
            indices.push_back(*idx);
        }
    }
    if (indices.empty()) return {};
    std::sort(indices.begin(), indices.end());
    std::vector<std::filesystem::path> paths;
    paths.reserve(indices.size());
    int expected = 0;
    for (int idx : indices) {
        if (idx != expected) {
            throw IoError("missing frame in sequence: expected " +
                          (dir / pattern.name(expected)).string());
        }
        paths.push_back(dir / pattern.name(idx));
        ++expected;
    }
    return paths;
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    return tmp;
}

void atomic_write_bytes(const std::filesystem::path& path,
                        const std::vector<std::uint8_t>& bytes) {
    const std::filesystem::path tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                          ": " + ec.message());
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= data[i];
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for checksum: " + path.string());
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<std::uint8_t>(buf[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    return hash;
}

std::string checksum_string(std::uint64_t value) {
    static const char* kHex = "0123456789abcdef";
    std::string s = "fnv64:";
    for (int shift = 60; shift >= 0; shift -= 4) {
        s += kHex[(value >> shift) & 0xF];
    }
    return s;
}

}  // namespace afv::detail
