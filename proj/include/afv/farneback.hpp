#pragma once

#include <vector>

#include "afv/core.hpp"

namespace afv {

// Parameters of the polynomial-expansion flow estimator.
//   pyramid_scale  per-level downscale factor, in (0,1)
//   levels         pyramid levels including the base image
//   window         odd side of the box window averaging the normal equations
//   iterations     displacement refinement rounds per level
//   poly_n         odd side of the quadratic-fit neighborhood (>= 3)
//   poly_sigma     Gaussian applicability width of the fit
// Defaults follow the most widely used reference parameterization.
struct FlowParams {
    double pyramid_scale = 0.5;
    int levels = 3;
    int window = 15;
    int iterations = 3;
    int poly_n = 5;
    double poly_sigma = 1.2;
};

// Rec.601 luma: 0.299 R + 0.587 G + 0.114 B. 1-channel input passes through.
Frame rgb_to_gray(const Frame& frame);

// Dense displacement field mapping prev -> next. Gaussian-weighted quadratic
// expansion of both frames per pyramid level, iterative refinement of the
// displacement from the expansion coefficients, coarse-to-fine initialization.
// Deterministic for fixed inputs and params.
FlowField estimate_flow(const Frame& prev, const Frame& next,
                        const FlowParams& params = {});

// T-1 fields for a T-frame video; field i maps frame i -> frame i+1.
std::vector<FlowField> estimate_video_flow(const FrameSequence& video,
                                           const FlowParams& params = {});

}  // namespace afv
