#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "afv/errors.hpp"

namespace afv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Per-pixel scalar grid, row-major. Used for flow magnitudes, coherence maps,
// gate masks and value maps. Gate/coherence/value instances lie in [0,1];
// magnitude instances are >= 0.
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return v_.empty(); }

    double at(int x, int y) const { return v_[index(x, y)]; }
    double& at(int x, int y) { return v_[index(x, y)]; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<double> v_;
};

// Dense per-pixel displacement field in pixels/frame. u positive rightward,
// v positive downward. Components are stored as float32 so that .flo
// serialization round-trips bit-exactly; arithmetic on top promotes to double.
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return u_.empty(); }

    float u(int x, int y) const { return u_[index(x, y)]; }
    float& u(int x, int y) { return u_[index(x, y)]; }
    float v(int x, int y) const { return v_[index(x, y)]; }
    float& v(int x, int y) { return v_[index(x, y)]; }

    Vec2 at(int x, int y) const { return {u(x, y), v(x, y)}; }

    const std::vector<float>& u_plane() const { return u_; }
    const std::vector<float>& v_plane() const { return v_; }
    std::vector<float>& u_plane() { return u_; }
    std::vector<float>& v_plane() { return v_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<float> u_;
    std::vector<float> v_;
};

// Per-pixel unit (epsilon-damped) flow directions: nx^2+ny^2 <= 1, with
// equality approached where the flow magnitude dominates epsilon.
class UnitVectorField {
public:
    UnitVectorField() = default;
    UnitVectorField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    double nx(int x, int y) const { return nx_[index(x, y)]; }
    double& nx(int x, int y) { return nx_[index(x, y)]; }
    double ny(int x, int y) const { return ny_[index(x, y)]; }
    double& ny(int x, int y) { return ny_[index(x, y)]; }

    const std::vector<double>& nx_plane() const { return nx_; }
    const std::vector<double>& ny_plane() const { return ny_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<double> nx_;
    std::vector<double> ny_;
};

// Single image: interleaved samples, 1 or 3 channels, intensities in [0,1].
// 3-channel frames are in R,G,B channel order (the order PNG files use);
// BGR ordering appears only in the raw HSV->BGR conversion result.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, int channels, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return px_.empty(); }

    double at(int x, int y, int c = 0) const { return px_[index(x, y, c)]; }
    double& at(int x, int y, int c = 0) { return px_[index(x, y, c)]; }

    const std::vector<double>& pixels() const { return px_; }
    std::vector<double>& pixels() { return px_; }

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> px_;
};

// Ordered frames of fixed resolution and channel count. frame_rate is
// metadata only and does not participate in any computation.
class FrameSequence {
public:
    FrameSequence() = default;
    FrameSequence(int width, int height, int channels, double frame_rate = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    double frame_rate() const { return frame_rate_; }
    void set_frame_rate(double fps) { frame_rate_ = fps; }

    std::size_t size() const { return frames_.size(); }
    bool empty() const { return frames_.empty(); }

    const Frame& frame(std::size_t i) const { return frames_[i]; }
    Frame& frame(std::size_t i) { return frames_[i]; }
    const std::vector<Frame>& frames() const { return frames_; }

    // Rejects frames whose dimensions or channel count differ from the sequence.
    void push(Frame f);

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    double frame_rate_ = 0.0;
    std::vector<Frame> frames_;
};

// Bilinear interpolation of the four neighboring grid values. Exact at
// integer grid points and exact on constant maps (difference formulation).
// Coordinates must satisfy 0 <= x <= width-1, 0 <= y <= height-1.
double bilinear_sample(const ScalarMap& map, double x, double y);
Vec2 bilinear_sample(const FlowField& flow, double x, double y);

// Unweighted k x k mean with replicate padding at the borders. k must be odd.
ScalarMap box_filter(const ScalarMap& map, int k);

// Linear-interpolation percentile on sorted order statistics:
// h = p*(n-1), interpolate between floor(h) and ceil(h). p in [0,1].
double percentile(std::vector<double> values, double p);

// Hexcone HSV -> BGR. h in degrees [0,360), s and v in [0,1].
// Returned channels are in B,G,R order, each in [0,1].
std::array<double, 3> hsv_to_bgr(double h_deg, double s, double v);

// Inverse conversion; returns {h_deg in [0,360), s, v}. Gray pixels get h=0.
std::array<double, 3> bgr_to_hsv(double b, double g, double r);

namespace detail {
// k x k box mean over a raw row-major plane, replicate padding, double
// accumulation. Shared by box_filter and the flow estimator.
void box_filter_plane(const double* in, double* out, int width, int height, int k);
}  // namespace detail

}  // namespace afv
