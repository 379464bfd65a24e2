#include "afv/frame_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "io_util.hpp"

namespace afv {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline std::uint8_t quantize(double v) {
    const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

}  // namespace

Frame load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open image: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: cannot create info struct");
    }
    std::vector<std::uint8_t> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize every variant to 8-bit gray or RGB.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_packing(png);
    const png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported channel count " + std::to_string(channels) + " in " +
                      path.string());
    }
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    data.resize(stride * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Frame frame(width, height, channels);
    for (std::size_t i = 0; i < data.size(); ++i) {
        frame.pixels()[i] = data[i] / 255.0;
    }
    return frame;
}

void save_png(const Frame& frame, const std::filesystem::path& path) {
    if (frame.empty()) throw ValidationError("save_png: empty frame");
    const std::filesystem::path tmp = detail::temp_sibling(path);
    {
        FilePtr fp(std::fopen(tmp.string().c_str(), "wb"));
        if (!fp) throw IoError("cannot open for writing: " + tmp.string());

        png_structp png =
            png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!png) throw IoError("libpng: cannot create write struct");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw IoError("libpng: cannot create info struct");
        }
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw IoError("failed to encode PNG: " + tmp.string());
        }
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, frame.width(), frame.height(), 8,
                     frame.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        const std::size_t stride =
            static_cast<std::size_t>(frame.width()) * frame.channels();
        std::vector<std::uint8_t> row(stride);
        for (int y = 0; y < frame.height(); ++y) {
            for (int x = 0; x < frame.width(); ++x) {
                for (int c = 0; c < frame.channels(); ++c) {
                    row[static_cast<std::size_t>(x) * frame.channels() + c] =
                        quantize(frame.at(x, y, c));
                }
            }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                          ": " + ec.message());
}

FrameSequence load_frames(const std::filesystem::path& dir, const std::string& pattern) {
    const auto paths = detail::list_sequence(dir, detail::SequencePattern::parse(pattern));
    if (paths.empty()) {
        throw IoError("no frames matching '" + pattern + "' in " + dir.string());
    }
    Frame first = load_png(paths.front());
    FrameSequence video(first.width(), first.height(), first.channels());
    video.push(std::move(first));
    for (std::size_t i = 1; i < paths.size(); ++i) {
        Frame f = load_png(paths[i]);
        if (f.width() != video.width() || f.height() != video.height() ||
            f.channels() != video.channels()) {
            throw ValidationError("inconsistent frame geometry in " + dir.string() +
                                  " at " + paths[i].filename().string());
        }
        video.push(std::move(f));
    }
    return video;
}

void save_frames(const FrameSequence& video, const std::filesystem::path& dir,
                 const std::string& pattern) {
    if (video.empty()) throw ValidationError("save_frames: empty sequence");
    const auto pat = detail::SequencePattern::parse(pattern);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < video.size(); ++i) {
        save_png(video.frame(i), dir / pat.name(static_cast<int>(i)));
    }
}

}  // namespace afv
