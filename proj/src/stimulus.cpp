#include "afv/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afv {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_range(double lo, double hi) {
    return lo + next_unit() * (hi - lo);
}

std::uint32_t Rng::next_below(std::uint32_t n) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint32_t>(prod >> 64);
}

std::uint64_t Rng::mix(std::uint64_t value) {
    return splitmix64(value);
}

DotPopulation init_dots(int width, int height, int count, int lifetime,
                        std::uint64_t seed) {
    if (width <= 0 || height <= 0) {
        throw ValidationError("init_dots: frame area must be positive");
    }
    if (count < 1) throw ValidationError("init_dots: dot count must be >= 1");
    if (lifetime < 1) throw ValidationError("init_dots: lifetime must be >= 1");

    DotPopulation pop{width, height, lifetime, {}, {}, {}, Rng(seed)};
    pop.x.reserve(count);
    pop.y.reserve(count);
    pop.age.reserve(count);
    for (int i = 0; i < count; ++i) {
        pop.x.push_back(pop.rng.next_range(0.0, width - 1));
        pop.y.push_back(pop.rng.next_range(0.0, height - 1));
        pop.age.push_back(static_cast<int>(pop.rng.next_below(lifetime)));
    }
    return pop;
}

void advance_dots(DotPopulation& pop, const FlowField& flow) {
    if (flow.width() != pop.frame_width || flow.height() != pop.frame_height) {
        throw ValidationError("advance_dots: flow dimensions do not match the population frame");
    }
    const double max_x = pop.frame_width - 1;
    const double max_y = pop.frame_height - 1;
    for (int i = 0; i < pop.count(); ++i) {
        const Vec2 vel = bilinear_sample(flow, pop.x[i], pop.y[i]);
        pop.x[i] += vel.x;
        pop.y[i] += vel.y;
        pop.age[i] += 1;
        const bool out = !(pop.x[i] >= 0.0 && pop.x[i] <= max_x &&
                           pop.y[i] >= 0.0 && pop.y[i] <= max_y);
        if (pop.age[i] >= pop.lifetime || out) {
            pop.x[i] = pop.rng.next_range(0.0, max_x);
            pop.y[i] = pop.rng.next_range(0.0, max_y);
            pop.age[i] = 0;
        }
    }
}

Frame render_dots(const DotPopulation& pop, int width, int height, int radius) {
    Frame frame(width, height, 1, 0.0);
    for (int i = 0; i < pop.count(); ++i) {
        const int px = static_cast<int>(std::lround(pop.x[i]));
        const int py = static_cast<int>(std::lround(pop.y[i]));
        if (radius <= 0) {
            if (px >= 0 && px < width && py >= 0 && py < height) frame.at(px, py) = 1.0;
            continue;
        }
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy > radius * radius) continue;
                const int qx = px + dx, qy = py + dy;
                if (qx >= 0 && qx < width && qy >= 0 && qy < height) frame.at(qx, qy) = 1.0;
            }
        }
    }
    return frame;
}

FrameSequence synthesize_dot_video(const std::vector<FlowField>& flows, int count,
                                   int lifetime, std::uint64_t seed, int radius) {
    if (flows.empty()) throw ValidationError("synthesize_dot_video: no flow fields");
    const int width = flows.front().width();
    const int height = flows.front().height();
    for (const FlowField& f : flows) {
        if (f.width() != width || f.height() != height) {
            throw ValidationError("synthesize_dot_video: flow dimensions differ across frames");
        }
    }
    DotPopulation pop = init_dots(width, height, count, lifetime, seed);
    FrameSequence out(width, height, 1);
    out.push(render_dots(pop, width, height, radius));
    for (const FlowField& f : flows) {
        advance_dots(pop, f);
        out.push(render_dots(pop, width, height, radius));
    }
    return out;
}

FrameSequence synthesize_noise_video(const std::vector<FlowField>& flows,
                                     std::uint64_t seed) {
    if (flows.empty()) throw ValidationError("synthesize_noise_video: no flow fields");
    const int width = flows.front().width();
    const int height = flows.front().height();
    for (const FlowField& f : flows) {
        if (f.width() != width || f.height() != height) {
            throw ValidationError("synthesize_noise_video: flow dimensions differ across frames");
        }
    }
    Rng rng(seed);
    Frame canvas(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) canvas.at(x, y) = rng.next_unit();
    }
    FrameSequence out(width, height, 1);
    out.push(canvas);

    const double max_x = width - 1;
    const double max_y = height - 1;
    for (const FlowField& f : flows) {
        Frame next(width, height, 1);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double sx = x - static_cast<double>(f.u(x, y));
                const double sy = y - static_cast<double>(f.v(x, y));
                if (sx >= 0.0 && sx <= max_x && sy >= 0.0 && sy <= max_y) {
                    // Backward warp with the forward flow as inverse-map approximation.
                    const int x0 = static_cast<int>(std::floor(sx));
                    const int y0 = static_cast<int>(std::floor(sy));
                    const int x1 = std::min(x0 + 1, width - 1);
                    const int y1 = std::min(y0 + 1, height - 1);
                    const double fx = sx - x0, fy = sy - y0;
                    const double v00 = canvas.at(x0, y0), v01 = canvas.at(x1, y0);
                    const double v10 = canvas.at(x0, y1), v11 = canvas.at(x1, y1);
                    const double top = v00 + fx * (v01 - v00);
                    const double bot = v10 + fx * (v11 - v10);
                    next.at(x, y) = top + fy * (bot - top);
                } else {
                    // Disocclusion: no source pixel, fill with fresh noise.
                    next.at(x, y) = rng.next_unit();
                }
            }
        }
        canvas = next;
        out.push(std::move(next));
    }
    return out;
}

}  // namespace afv
