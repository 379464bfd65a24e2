#pragma once

// Private helpers shared by the file-format readers/writers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afv/errors.hpp"

namespace afv::detail {

// Numbered-file pattern with exactly one %d / %0Nd placeholder,
// e.g. "frame_%06d.png" or "flow_%06d.flo".
struct SequencePattern {
    std::string prefix;
    std::string suffix;
    int min_digits = 1;

    static SequencePattern parse(const std::string& pattern);
    std::string name(int index) const;
    // Index if the filename matches prefix + digits + suffix.
    std::optional<int> match(const std::string& filename) const;
};

// Paths for indices 0..T-1; a gap in the numbering is an IoError naming the
// missing file. Empty result if the directory holds no matching file.
std::vector<std::filesystem::path> list_sequence(const std::filesystem::path& dir,
                                                 const SequencePattern& pattern);

// Write-temp-then-rename so concurrent runs never observe partial files.
void atomic_write_bytes(const std::filesystem::path& path,
                        const std::vector<std::uint8_t>& bytes);

std::filesystem::path temp_sibling(const std::filesystem::path& path);

// 64-bit FNV-1a, the checksum used in run manifests.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string checksum_string(std::uint64_t value);

}  // namespace afv::detail
