#include "afv/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afv {

namespace {

void check_positive_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

ScalarMap::ScalarMap(int width, int height, double fill)
    : width_(width), height_(height) {
    check_positive_dims(width, height);
    v_.assign(static_cast<std::size_t>(width) * height, fill);
}

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
    check_positive_dims(width, height);
    u_.assign(static_cast<std::size_t>(width) * height, 0.0f);
    v_.assign(static_cast<std::size_t>(width) * height, 0.0f);
}

UnitVectorField::UnitVectorField(int width, int height)
    : width_(width), height_(height) {
    check_positive_dims(width, height);
    nx_.assign(static_cast<std::size_t>(width) * height, 0.0);
    ny_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

Frame::Frame(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_positive_dims(width, height);
    if (channels != 1 && channels != 3) {
        throw ValidationError("frame channel count must be 1 or 3, got " +
                              std::to_string(channels));
    }
    px_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

FrameSequence::FrameSequence(int width, int height, int channels, double frame_rate)
    : width_(width), height_(height), channels_(channels), frame_rate_(frame_rate) {
    check_positive_dims(width, height);
    if (channels != 1 && channels != 3) {
        throw ValidationError("frame channel count must be 1 or 3, got " +
                              std::to_string(channels));
    }
}

void FrameSequence::push(Frame f) {
    if (f.width() != width_ || f.height() != height_ || f.channels() != channels_) {
        throw ValidationError("frame does not match sequence geometry (" +
                              std::to_string(width_) + "x" + std::to_string(height_) + "x" +
                              std::to_string(channels_) + "), got " +
                              std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                              "x" + std::to_string(f.channels()));
    }
    frames_.push_back(std::move(f));
}

namespace {

struct BilinearWeights {
    int x0, y0, x1, y1;
    double fx, fy;
};

BilinearWeights bilinear_setup(int width, int height, double x, double y,
                               const char* what) {
    if (!(x >= 0.0 && x <= width - 1 && y >= 0.0 && y <= height - 1)) {
        throw ValidationError(std::string("bilinear_sample: coordinates out of range for ") +
                              what + " (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") on " + std::to_string(width) + "x" + std::to_string(height));
    }
    BilinearWeights w;
    w.x0 = static_cast<int>(std::floor(x));
    w.y0 = static_cast<int>(std::floor(y));
    w.x1 = std::min(w.x0 + 1, width - 1);
    w.y1 = std::min(w.y0 + 1, height - 1);
    w.fx = x - w.x0;
    w.fy = y - w.y0;
    return w;
}

// Difference form: exact on constant data and at grid points.
inline double lerp2(double v00, double v01, double v10, double v11, double fx, double fy) {
    const double top = v00 + fx * (v01 - v00);
    const double bot = v10 + fx * (v11 - v10);
    return top + fy * (bot - top);
}

}  // namespace

double bilinear_sample(const ScalarMap& map, double x, double y) {
    const BilinearWeights w = bilinear_setup(map.width(), map.height(), x, y, "ScalarMap");
    return lerp2(map.at(w.x0, w.y0), map.at(w.x1, w.y0),
                 map.at(w.x0, w.y1), map.at(w.x1, w.y1), w.fx, w.fy);
}

Vec2 bilinear_sample(const FlowField& flow, double x, double y) {
    const BilinearWeights w = bilinear_setup(flow.width(), flow.height(), x, y, "FlowField");
    return {lerp2(flow.u(w.x0, w.y0), flow.u(w.x1, w.y0),
                  flow.u(w.x0, w.y1), flow.u(w.x1, w.y1), w.fx, w.fy),
            lerp2(flow.v(w.x0, w.y0), flow.v(w.x1, w.y0),
                  flow.v(w.x0, w.y1), flow.v(w.x1, w.y1), w.fx, w.fy)};
}

namespace detail {

void box_filter_plane(const double* in, double* out, int width, int height, int k) {
    const int r = k / 2;
    const double inv = 1.0 / k;
    std::vector<double> tmp(static_cast<std::size_t>(width) * height);

    // Horizontal pass, sliding window over clamped indices.
    for (int y = 0; y < height; ++y) {
        const double* row = in + static_cast<std::size_t>(y) * width;
        double* trow = tmp.data() + static_cast<std::size_t>(y) * width;
        double sum = 0.0;
        for (int i = -r; i <= r; ++i) sum += row[std::clamp(i, 0, width - 1)];
        trow[0] = sum * inv;
        for (int x = 1; x < width; ++x) {
            sum += row[std::clamp(x + r, 0, width - 1)];
            sum -= row[std::clamp(x - r - 1, 0, width - 1)];
            trow[x] = sum * inv;
        }
    }
    // Vertical pass.
    std::vector<double> col(height);
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) col[y] = tmp[static_cast<std::size_t>(y) * width + x];
        double sum = 0.0;
        for (int i = -r; i <= r; ++i) sum += col[std::clamp(i, 0, height - 1)];
        out[x] = sum * inv;
        for (int y = 1; y < height; ++y) {
            sum += col[std::clamp(y + r, 0, height - 1)];
            sum -= col[std::clamp(y - r - 1, 0, height - 1)];
            out[static_cast<std::size_t>(y) * width + x] = sum * inv;
        }
    }
}

}  // namespace detail

ScalarMap box_filter(const ScalarMap& map, int k) {
    if (k < 1 || k % 2 == 0) {
        throw ValidationError("box_filter window must be odd and >= 1, got " +
                              std::to_string(k));
    }
    if (map.empty()) throw ValidationError("box_filter: empty map");
    if (k == 1) return map;
    ScalarMap out(map.width(), map.height());
    detail::box_filter_plane(map.values().data(), out.values().data(),
                             map.width(), map.height(), k);
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("percentile: p must be in [0,1], got " + std::to_string(p));
    }
    std::sort(values.begin(), values.end());
    const double h = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return values[lo];
    const double frac = h - lo;
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::array<double, 3> hsv_to_bgr(double h_deg, double s, double v) {
    const double c = v * s;
    const double hp = h_deg / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r1 = 0.0, g1 = 0.0, b1 = 0.0;
    if (hp < 1.0)      { r1 = c; g1 = x; }
    else if (hp < 2.0) { r1 = x; g1 = c; }
    else if (hp < 3.0) { g1 = c; b1 = x; }
    else if (hp < 4.0) { g1 = x; b1 = c; }
    else if (hp < 5.0) { r1 = x; b1 = c; }
    else               { r1 = c; b1 = x; }
    const double m = v - c;
    return {b1 + m, g1 + m, r1 + m};
}

std::array<double, 3> bgr_to_hsv(double b, double g, double r) {
    const double v = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double c = v - mn;
    double h = 0.0;
    if (c > 0.0) {
        if (v == r)      h = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
        else if (v == g) h = 60.0 * ((b - r) / c + 2.0);
        else             h = 60.0 * ((r - g) / c + 4.0);
    }
    if (h >= 360.0) h -= 360.0;
    const double s = v > 0.0 ? c / v : 0.0;
    return {h, s, v};
}

}  // namespace afv
