#pragma once

#include <vector>

#include "afv/core.hpp"

namespace afv {

// Per-frame normalization of the flow magnitude for the HSV value channel.
// The reference scale d_t mixes a corpus-level percentile magnitude p_train
// with the current frame's percentile magnitude:
//   d_t = mix_weight * p_train + (1 - mix_weight) * frame_p95
// mix_weight = 0 disables the corpus term (p_train may then be unset).
struct NormalizationConfig {
    double p_train = 0.0;
    double mix_weight = 0.5;
    double offset_fraction = 0.03;
    double saturation = 1.0;
};

// Floor on d_t so fully static frames do not divide by zero; such frames
// encode to black regardless.
inline constexpr double kScaleFloor = 1e-3;

// Percentile of the per-frame magnitude distribution used everywhere.
inline constexpr double kFlowPercentile = 0.95;

// Per-pixel L2 norm of the flow.
ScalarMap flow_magnitude(const FlowField& flow);

// Percentile of the per-pixel flow magnitudes of one field.
double flow_percentile_magnitude(const FlowField& flow, double p = kFlowPercentile);

// d_t for one frame given its percentile magnitude. Floored at kScaleFloor.
double compute_reference_scale(const NormalizationConfig& config, double frame_p95);

// d_t for every frame of a video. The same values feed the value-channel
// normalization and the coherence gate's magnitude term.
std::vector<double> per_frame_reference_scales(const std::vector<FlowField>& flows,
                                               const NormalizationConfig& config);

// Pre-gate value map: V0 = clamp(m/d_t - offset_fraction, 0, 1).
ScalarMap pre_gate_value(const ScalarMap& magnitude, double d_t, double offset_fraction);

// Flow direction as hue in degrees [0,360): (u>0,v=0) -> 0, (0,v>0) -> 90,
// measured clockwise in image coordinates (y down). Zero vectors map to 0.
ScalarMap flow_to_hue(const FlowField& flow);

// HSV motion video: hue from direction, fixed saturation, value from the
// normalized magnitude, optionally attenuated by the smoothed gate masks,
// clamped to [0,1] and converted to BGR. Output frames are stored in RGB
// channel order (the PNG convention); one output frame per flow field.
FrameSequence encode_hsv_video(const std::vector<FlowField>& flows,
                               const NormalizationConfig& config,
                               const std::vector<ScalarMap>* gate_masks = nullptr);

// Mirror an encoded motion video left-right and remap the hue
// h' = (180 - h) mod 360 so the direction encoding stays consistent:
// flipping the source flow (u -> -u plus spatial mirror) and encoding equals
// encoding followed by this operation, up to 8-bit quantization.
FrameSequence flip_horizontal_with_hue_remap(const FrameSequence& encoded);

// Raw HSV container frames for inspection (not displayable color): channel 0
// stores the byte convention round(h/2) in [0,179] rescaled to [0,1] so that
// 8-bit files carry the hue byte exactly; channels 1 and 2 store saturation
// and the (optionally gated) value.
FrameSequence encode_hsv_raw_video(const std::vector<FlowField>& flows,
                                   const NormalizationConfig& config,
                                   const std::vector<ScalarMap>* gate_masks = nullptr);

}  // namespace afv
