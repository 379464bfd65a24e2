#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "afv/core.hpp"

namespace afv {

// xoshiro256++ seeded through splitmix64. Fixed algorithm, identical output
// for a given 64-bit seed on every platform; all stimulus randomness flows
// through explicit instances of this generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0,1), 53 random bits.
    double next_unit();

    // Uniform double in [lo, hi).
    double next_range(double lo, double hi);

    // Uniform integer in [0, n), n >= 1 (multiply-shift bound mapping).
    std::uint32_t next_below(std::uint32_t n);

    // One splitmix64 dispersion step; used to derive per-video seeds.
    static std::uint64_t mix(std::uint64_t value);

private:
    std::array<std::uint64_t, 4> s_;
};

// Sparse-dot simulator state. Positions stay within
// [0,width-1] x [0,height-1]; ages stay below the lifetime; the dot count is
// constant across frames.
struct DotPopulation {
    int frame_width = 0;
    int frame_height = 0;
    int lifetime = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<int> age;
    Rng rng;

    int count() const { return static_cast<int>(x.size()); }
};

// N dots uniform over the frame; ages uniform over {0..lifetime-1} so
// respawns are spread across frames instead of synchronizing every L frames.
DotPopulation init_dots(int width, int height, int count, int lifetime,
                        std::uint64_t seed);

// One simulation step: velocity by bilinear sampling of the flow at the dot
// location, position update, aging; expired or out-of-bounds dots respawn at
// a uniform random location with age 0.
void advance_dots(DotPopulation& pop, const FlowField& flow);

// Dots on a black background at intensity 1.0. radius 0 renders the single
// nearest pixel; radius r fills the disc dx^2+dy^2 <= r^2, clipped at edges.
// Coincident dots saturate at 1.0.
Frame render_dots(const DotPopulation& pop, int width, int height, int radius = 0);

// Sparse random-dot video driven by the flow: frame 0 renders the initial
// population, each later frame renders the advanced population. len(flows)+1
// frames out.
FrameSequence synthesize_dot_video(const std::vector<FlowField>& flows, int count,
                                   int lifetime, std::uint64_t seed, int radius = 0);

// Dense-noise video: frame 0 is i.i.d. uniform noise; frame t+1 backward-warps
// frame t through the forward flow (bilinear), drawing fresh noise where the
// source coordinate falls outside the frame. len(flows)+1 frames out.
FrameSequence synthesize_noise_video(const std::vector<FlowField>& flows,
                                     std::uint64_t seed);

}  // namespace afv
