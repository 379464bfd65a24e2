#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "afv/core.hpp"

namespace afv {

// Middlebury .flo interchange:
//   bytes 0-3   float32 202021.25 ("PIEH"), little-endian sanity tag
//   bytes 4-7   int32 width
//   bytes 8-11  int32 height
//   bytes 12-   row-major interleaved float32 (u,v) pairs
// Writes are atomic (temp file + rename) and round-trip bit-exactly.

void write_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

// Numbered sequence in one directory, indices contiguous from 0. A missing
// index is an I/O error naming the absent file.
std::vector<FlowField> read_flo_sequence(const std::filesystem::path& dir,
                                         const std::string& pattern = "flow_%06d.flo");
void write_flo_sequence(const std::vector<FlowField>& flows,
                        const std::filesystem::path& dir,
                        const std::string& pattern = "flow_%06d.flo");

}  // namespace afv
