#pragma once

#include <filesystem>
#include <string>

#include "afv/core.hpp"

namespace afv {

// PNG frame sequences: zero-padded numbered 8-bit files, grayscale or RGB.
// Intensities quantize to 8 bits only at this boundary; a save/load round
// trip is lossless for 8-bit-quantized content. Writes are atomic.

Frame load_png(const std::filesystem::path& path);
void save_png(const Frame& frame, const std::filesystem::path& path);

// Loads frame_%06d.png (or a custom pattern) with indices contiguous from 0;
// a gap is an I/O error naming the missing file, inconsistent geometry across
// frames is a format error.
FrameSequence load_frames(const std::filesystem::path& dir,
                          const std::string& pattern = "frame_%06d.png");

void save_frames(const FrameSequence& video, const std::filesystem::path& dir,
                 const std::string& pattern = "frame_%06d.png");

}  // namespace afv
