#pragma once

#include <vector>

#include "afv/core.hpp"

namespace afv {

// Common-fate gating of the motion encoding: local orientation coherence is
// the resultant length of window-averaged unit flow vectors; the gate mask is
// the product of a normalized-magnitude term and the soft-thresholded
// coherence raised to an exponent, smoothed over time with an EMA.
//
// Hyperparameters are never fitted on appearance-free data; non-default
// values should be recorded in the config's provenance section.
struct GateParams {
    double epsilon = 1e-6;  // unit-vector damping, > 0
    int window = 9;         // odd coherence window side
    double tau = 0.30;      // coherence soft threshold, in [0,1)
    double r_min = 0.02;    // magnitude hard threshold as a fraction of d_t
    double beta = 1.0;      // coherence-weighting exponent, >= 0
    double lambda = 0.80;   // EMA coefficient, in [0,1)
};

// Temporal state confined to one video's pipeline instance. The first
// frame's instantaneous mask initializes the smoothed mask.
struct GateState {
    ScalarMap g_prev;
    bool initialized = false;
};

// n = f / (|f| + epsilon), componentwise per pixel.
UnitVectorField unit_flow(const FlowField& flow, double epsilon);

// Resultant length of the window-mean unit vectors, in [0,1].
ScalarMap coherence(const UnitVectorField& nfield, int window);

// Values below tau go to zero; above tau rescale linearly onto [0,1].
ScalarMap soft_threshold_coherence(const ScalarMap& c, double tau);

// q = clamp(m/d_t, 0, 1), zeroed where m/d_t < r_min.
ScalarMap magnitude_term(const ScalarMap& magnitude, double d_t, double r_min);

// g_inst = q * w_c^beta, with 0^0 = 1 so beta = 0 disables the coherence term.
ScalarMap instantaneous_mask(const ScalarMap& q, const ScalarMap& w_c, double beta);

// g_t = lambda * g_{t-1} + (1-lambda) * g_inst; the first update passes
// g_inst through unchanged. Updates the state and returns g_t.
ScalarMap ema_update(GateState& state, const ScalarMap& g_inst, double lambda);

// Full per-video gate: one smoothed mask per flow field, values in [0,1].
// d_ts must hold the per-frame reference scales, one per flow field.
std::vector<ScalarMap> gate_video(const std::vector<FlowField>& flows,
                                  const std::vector<double>& d_ts,
                                  const GateParams& params = {});

void validate_gate_params(const GateParams& params);

}  // namespace afv
