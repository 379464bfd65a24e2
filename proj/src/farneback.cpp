#include "afv/farneback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afv {

namespace {

using Plane = std::vector<double>;

void validate_params(const FlowParams& p) {
    if (!(p.pyramid_scale > 0.0 && p.pyramid_scale < 1.0)) {
        throw ValidationError("FlowParams.pyramid_scale must be in (0,1)");
    }
    if (p.levels < 1) throw ValidationError("FlowParams.levels must be >= 1");
    if (p.window < 1 || p.window % 2 == 0) {
        throw ValidationError("FlowParams.window must be odd and >= 1");
    }
    if (p.iterations < 1) throw ValidationError("FlowParams.iterations must be >= 1");
    if (p.poly_n < 3 || p.poly_n % 2 == 0) {
        throw ValidationError("FlowParams.poly_n must be odd and >= 3");
    }
    if (!(p.poly_sigma > 0.0)) throw ValidationError("FlowParams.poly_sigma must be > 0");
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable correlation with replicate padding.
void gaussian_blur_plane(const Plane& in, Plane& out, int width, int height,
                         const std::vector<double>& kernel) {
    const int r = static_cast<int>(kernel.size()) / 2;
    Plane tmp(in.size());
    for (int y = 0; y < height; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += kernel[i + r] * row[std::clamp(x + i, 0, width - 1)];
            tmp[static_cast<std::size_t>(y) * width + x] = s;
        }
    }
    out.resize(in.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                s += kernel[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, height - 1)) * width + x];
            }
            out[static_cast<std::size_t>(y) * width + x] = s;
        }
    }
}

// Center-aligned bilinear resize with edge clamping.
Plane resize_bilinear(const Plane& src, int sw, int sh, int dw, int dh) {
    Plane dst(static_cast<std::size_t>(dw) * dh);
    const double sx = static_cast<double>(sw) / dw;
    const double sy = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, sh - 1);
        const double wy = fy - y0;
        for (int x = 0; x < dw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, sw - 1);
            const double wx = fx - x0;
            const double v00 = src[static_cast<std::size_t>(y0) * sw + x0];
            const double v01 = src[static_cast<std::size_t>(y0) * sw + x1];
            const double v10 = src[static_cast<std::size_t>(y1) * sw + x0];
            const double v11 = src[static_cast<std::size_t>(y1) * sw + x1];
            const double top = v00 + wx * (v01 - v00);
            const double bot = v10 + wx * (v11 - v10);
            dst[static_cast<std::size_t>(y) * dw + x] = top + wy * (bot - top);
        }
    }
    return dst;
}

// Per-pixel coefficients of the weighted quadratic fit
//   f(p + d) ~ dc + bx dx + by dy + axx dx^2 + ayy dy^2 + axy dx dy
// over a poly_n x poly_n neighborhood with Gaussian applicability.
struct PolyExpansion {
    int width = 0, height = 0;
    Plane bx, by, axx, ayy, axy;
};

PolyExpansion poly_expansion(const Plane& img, int width, int height,
                             int poly_n, double sigma) {
    const int m = poly_n / 2;
    std::vector<double> g(2 * m + 1), xg(2 * m + 1), xxg(2 * m + 1);
    double gsum = 0.0;
    for (int i = -m; i <= m; ++i) gsum += std::exp(-0.5 * i * i / (sigma * sigma));
    double m2 = 0.0, m4 = 0.0;
    for (int i = -m; i <= m; ++i) {
        const double w = std::exp(-0.5 * i * i / (sigma * sigma)) / gsum;
        g[i + m] = w;
        xg[i + m] = i * w;
        xxg[i + m] = static_cast<double>(i) * i * w;
        m2 += static_cast<double>(i) * i * w;
        m4 += static_cast<double>(i) * i * i * i * w;
    }
    // Inverse of the normal-equation matrix reduces to these scalars because
    // odd moments vanish and the applicability is separable.
    const double inv_m2 = 1.0 / m2;
    const double inv_m2m2 = 1.0 / (m2 * m2);
    const double inv_spread = 1.0 / (m4 - m2 * m2);

    const std::size_t n = static_cast<std::size_t>(width) * height;
    // Vertical pass: per-column moments of order 0, 1, 2 in y.
    Plane t0(n), t1(n), t2(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (int i = -m; i <= m; ++i) {
                const double v = img[static_cast<std::size_t>(std::clamp(y + i, 0, height - 1)) * width + x];
                s0 += g[i + m] * v;
                s1 += xg[i + m] * v;
                s2 += xxg[i + m] * v;
            }
            const std::size_t idx = static_cast<std::size_t>(y) * width + x;
            t0[idx] = s0;
            t1[idx] = s1;
            t2[idx] = s2;
        }
    }

    PolyExpansion r;
    r.width = width;
    r.height = height;
    r.bx.resize(n);
    r.by.resize(n);
    r.axx.resize(n);
    r.ayy.resize(n);
    r.axy.resize(n);

    // Horizontal pass combining the six window moments, then the sparse solve.
    for (int y = 0; y < height; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double s_dc = 0.0, s_x = 0.0, s_y = 0.0, s_xx = 0.0, s_yy = 0.0, s_xy = 0.0;
            for (int i = -m; i <= m; ++i) {
                const std::size_t idx = row + std::clamp(x + i, 0, width - 1);
                s_dc += g[i + m] * t0[idx];
                s_x += xg[i + m] * t0[idx];
                s_xx += xxg[i + m] * t0[idx];
                s_y += g[i + m] * t1[idx];
                s_xy += xg[i + m] * t1[idx];
                s_yy += g[i + m] * t2[idx];
            }
            const double sum = (s_xx + s_yy - 2.0 * m2 * s_dc) * inv_spread;
            const double diff = (s_xx - s_yy) * inv_spread;
            const std::size_t idx = row + x;
            r.bx[idx] = s_x * inv_m2;
            r.by[idx] = s_y * inv_m2;
            r.axx[idx] = 0.5 * (sum + diff);
            r.ayy[idx] = 0.5 * (sum - diff);
            r.axy[idx] = s_xy * inv_m2m2;
        }
    }
    return r;
}

inline double lerp_plane(const Plane& p, int width, int height, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0, fy = y - y0;
    const double v00 = p[static_cast<std::size_t>(y0) * width + x0];
    const double v01 = p[static_cast<std::size_t>(y0) * width + x1];
    const double v10 = p[static_cast<std::size_t>(y1) * width + x0];
    const double v11 = p[static_cast<std::size_t>(y1) * width + x1];
    const double top = v00 + fx * (v01 - v00);
    const double bot = v10 + fx * (v11 - v10);
    return top + fy * (bot - top);
}

// Constraints near the frame edge get a reduced certainty weight.
inline double border_weight(int x, int y, int width, int height) {
    constexpr int kBorder = 5;
    const int d = std::min(std::min(x, width - 1 - x), std::min(y, height - 1 - y));
    return d >= kBorder - 1 ? 1.0 : (d + 1) / static_cast<double>(kBorder);
}

// One refinement round: rebuild the per-pixel normal equations around the
// current displacement, average them over the window, solve 2x2 per pixel.
void refine_flow(const PolyExpansion& r1, const PolyExpansion& r2,
                 Plane& flow_u, Plane& flow_v, int window) {
    const int width = r1.width, height = r1.height;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    Plane g11(n), g12(n), g22(n), h1(n), h2(n);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * width + x;
            const double du = flow_u[idx];
            const double dv = flow_v[idx];
            const double wx = std::clamp(x + du, 0.0, static_cast<double>(width - 1));
            const double wy = std::clamp(y + dv, 0.0, static_cast<double>(height - 1));

            const double a11 = 0.5 * (r1.axx[idx] + lerp_plane(r2.axx, width, height, wx, wy));
            const double a22 = 0.5 * (r1.ayy[idx] + lerp_plane(r2.ayy, width, height, wx, wy));
            // The cross coefficient is twice the off-diagonal entry of A.
            const double a12 = 0.25 * (r1.axy[idx] + lerp_plane(r2.axy, width, height, wx, wy));
            const double dbx = 0.5 * (r1.bx[idx] - lerp_plane(r2.bx, width, height, wx, wy)) +
                               a11 * du + a12 * dv;
            const double dby = 0.5 * (r1.by[idx] - lerp_plane(r2.by, width, height, wx, wy)) +
                               a12 * du + a22 * dv;

            const double w = border_weight(x, y, width, height);
            g11[idx] = w * (a11 * a11 + a12 * a12);
            g12[idx] = w * (a12 * (a11 + a22));
            g22[idx] = w * (a22 * a22 + a12 * a12);
            h1[idx] = w * (a11 * dbx + a12 * dby);
            h2[idx] = w * (a12 * dbx + a22 * dby);
        }
    }

    if (window > 1) {
        Plane blurred(n);
        for (Plane* p : {&g11, &g12, &g22, &h1, &h2}) {
            detail::box_filter_plane(p->data(), blurred.data(), width, height, window);
            p->swap(blurred);
        }
    }

    constexpr double kDetFloor = 1e-18;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double det = g11[idx] * g22[idx] - g12[idx] * g12[idx];
        if (det > kDetFloor) {
            flow_u[idx] = (g22[idx] * h1[idx] - g12[idx] * h2[idx]) / det;
            flow_v[idx] = (g11[idx] * h2[idx] - g12[idx] * h1[idx]) / det;
        }
        // Degenerate structure (textureless patch): keep the prior estimate.
    }
}

Plane frame_to_plane(const Frame& f) {
    Plane p(static_cast<std::size_t>(f.width()) * f.height());
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            p[static_cast<std::size_t>(y) * f.width() + x] = f.at(x, y);
        }
    }
    return p;
}

}  // namespace

Frame rgb_to_gray(const Frame& frame) {
    if (frame.channels() == 1) return frame;
    Frame gray(frame.width(), frame.height(), 1);
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            gray.at(x, y) = 0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) +
                            0.114 * frame.at(x, y, 2);
        }
    }
    return gray;
}

FlowField estimate_flow(const Frame& prev, const Frame& next, const FlowParams& params) {
    validate_params(params);
    if (prev.width() != next.width() || prev.height() != next.height() ||
        prev.channels() != next.channels()) {
        throw ValidationError("estimate_flow: frame dimensions do not match");
    }
    if (prev.empty()) throw ValidationError("estimate_flow: empty frames");

    const Frame prev_gray = rgb_to_gray(prev);
    const Frame next_gray = rgb_to_gray(next);
    const int width = prev_gray.width(), height = prev_gray.height();

    // Level geometry; the coarsest level must still fit the fit neighborhood.
    std::vector<int> lw(params.levels), lh(params.levels);
    for (int k = 0; k < params.levels; ++k) {
        const double scale = std::pow(params.pyramid_scale, k);
        lw[k] = std::max(1, static_cast<int>(std::lround(width * scale)));
        lh[k] = std::max(1, static_cast<int>(std::lround(height * scale)));
    }
    const int coarsest = params.levels - 1;
    if (lw[coarsest] < params.poly_n || lh[coarsest] < params.poly_n) {
        throw ValidationError(
            "estimate_flow: frames smaller than poly_n at the coarsest pyramid level (" +
            std::to_string(lw[coarsest]) + "x" + std::to_string(lh[coarsest]) +
            " vs poly_n " + std::to_string(params.poly_n) + ")");
    }

    const Plane base1 = frame_to_plane(prev_gray);
    const Plane base2 = frame_to_plane(next_gray);

    Plane flow_u, flow_v;
    int prev_w = 0, prev_h = 0;
    for (int k = coarsest; k >= 0; --k) {
        // Each level is built from the base image: blur, then resize.
        Plane img1, img2;
        if (k == 0) {
            img1 = base1;
            img2 = base2;
        } else {
            const double scale = std::pow(params.pyramid_scale, k);
            const double sigma = (1.0 / scale - 1.0) * 0.5;
            const int radius = std::max(1, static_cast<int>(std::lround(sigma * 2.5)));
            const auto kernel = gaussian_kernel(sigma, radius);
            Plane blurred;
            gaussian_blur_plane(base1, blurred, width, height, kernel);
            img1 = resize_bilinear(blurred, width, height, lw[k], lh[k]);
            gaussian_blur_plane(base2, blurred, width, height, kernel);
            img2 = resize_bilinear(blurred, width, height, lw[k], lh[k]);
        }

        if (k == coarsest) {
            flow_u.assign(static_cast<std::size_t>(lw[k]) * lh[k], 0.0);
            flow_v.assign(static_cast<std::size_t>(lw[k]) * lh[k], 0.0);
        } else {
            flow_u = resize_bilinear(flow_u, prev_w, prev_h, lw[k], lh[k]);
            flow_v = resize_bilinear(flow_v, prev_w, prev_h, lw[k], lh[k]);
            const double su = static_cast<double>(lw[k]) / prev_w;
            const double sv = static_cast<double>(lh[k]) / prev_h;
            for (double& u : flow_u) u *= su;
            for (double& v : flow_v) v *= sv;
        }

        const PolyExpansion r1 = poly_expansion(img1, lw[k], lh[k], params.poly_n, params.poly_sigma);
        const PolyExpansion r2 = poly_expansion(img2, lw[k], lh[k], params.poly_n, params.poly_sigma);
        for (int it = 0; it < params.iterations; ++it) {
            refine_flow(r1, r2, flow_u, flow_v, params.window);
        }
        prev_w = lw[k];
        prev_h = lh[k];
    }

    FlowField out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * width + x;
            if (!std::isfinite(flow_u[idx]) || !std::isfinite(flow_v[idx])) {
                throw ValidationError("estimate_flow: non-finite flow value produced");
            }
            out.u(x, y) = static_cast<float>(flow_u[idx]);
            out.v(x, y) = static_cast<float>(flow_v[idx]);
        }
    }
    return out;
}

std::vector<FlowField> estimate_video_flow(const FrameSequence& video,
                                           const FlowParams& params) {
    if (video.size() < 2) {
        throw ValidationError("estimate_video_flow: at least 2 frames required, got " +
                              std::to_string(video.size()));
    }
    std::vector<Frame> gray;
    gray.reserve(video.size());
    for (std::size_t i = 0; i < video.size(); ++i) gray.push_back(rgb_to_gray(video.frame(i)));

    std::vector<FlowField> flows;
    flows.reserve(video.size() - 1);
    for (std::size_t i = 0; i + 1 < video.size(); ++i) {
        flows.push_back(estimate_flow(gray[i], gray[i + 1], params));
    }
    return flows;
}

}  // namespace afv
