#include "afv/flow_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace afv {

ScalarMap flow_magnitude(const FlowField& flow) {
    ScalarMap m(flow.width(), flow.height());
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            const double u = flow.u(x, y);
            const double v = flow.v(x, y);
            m.at(x, y) = std::sqrt(u * u + v * v);
        }
    }
    return m;
}

double flow_percentile_magnitude(const FlowField& flow, double p) {
    return percentile(flow_magnitude(flow).values(), p);
}

double compute_reference_scale(const NormalizationConfig& config, double frame_p95) {
    if (frame_p95 < 0.0) {
        throw ValidationError("compute_reference_scale: frame percentile must be >= 0");
    }
    if (!(config.mix_weight >= 0.0 && config.mix_weight <= 1.0)) {
        throw ValidationError("NormalizationConfig.mix_weight must be in [0,1]");
    }
    if (config.mix_weight > 0.0 && !(config.p_train > 0.0)) {
        throw ValidationError(
            "NormalizationConfig.p_train must be > 0 when mix_weight > 0 "
            "(collect a training scale or set mix_weight = 0)");
    }
    const double d =
        config.mix_weight * config.p_train + (1.0 - config.mix_weight) * frame_p95;
    return std::max(d, kScaleFloor);
}

std::vector<double> per_frame_reference_scales(const std::vector<FlowField>& flows,
                                               const NormalizationConfig& config) {
    std::vector<double> scales;
    scales.reserve(flows.size());
    for (const FlowField& f : flows) {
        scales.push_back(compute_reference_scale(config, flow_percentile_magnitude(f)));
    }
    return scales;
}

ScalarMap pre_gate_value(const ScalarMap& magnitude, double d_t, double offset_fraction) {
    if (!(d_t > 0.0)) throw ValidationError("pre_gate_value: d_t must be > 0");
    ScalarMap v(magnitude.width(), magnitude.height());
    for (int y = 0; y < magnitude.height(); ++y) {
        for (int x = 0; x < magnitude.width(); ++x) {
            v.at(x, y) = std::clamp(magnitude.at(x, y) / d_t - offset_fraction, 0.0, 1.0);
        }
    }
    return v;
}

ScalarMap flow_to_hue(const FlowField& flow) {
    constexpr double kRadToDeg = 180.0 / std::numbers::pi;
    ScalarMap hue(flow.width(), flow.height());
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            const double u = flow.u(x, y);
            const double v = flow.v(x, y);
            if (u == 0.0 && v == 0.0) {
                hue.at(x, y) = 0.0;
                continue;
            }
            double h = std::atan2(v, u) * kRadToDeg;
            if (h < 0.0) h += 360.0;
            if (h >= 360.0) h = 0.0;
            hue.at(x, y) = h;
        }
    }
    return hue;
}

FrameSequence encode_hsv_video(const std::vector<FlowField>& flows,
                               const NormalizationConfig& config,
                               const std::vector<ScalarMap>* gate_masks) {
    if (flows.empty()) throw ValidationError("encode_hsv_video: no flow fields");
    const int width = flows.front().width();
    const int height = flows.front().height();
    for (const FlowField& f : flows) {
        if (f.width() != width || f.height() != height) {
            throw ValidationError("encode_hsv_video: flow dimensions differ across frames");
        }
    }
    if (gate_masks) {
        if (gate_masks->size() != flows.size()) {
            throw ValidationError("encode_hsv_video: gate mask count (" +
                                  std::to_string(gate_masks->size()) +
                                  ") does not match flow count (" +
                                  std::to_string(flows.size()) + ")");
        }
        for (const ScalarMap& g : *gate_masks) {
            if (g.width() != width || g.height() != height) {
                throw ValidationError("encode_hsv_video: gate mask dimensions mismatch");
            }
        }
    }

    FrameSequence out(width, height, 3);
    for (std::size_t t = 0; t < flows.size(); ++t) {
        const FlowField& f = flows[t];
        const ScalarMap mag = flow_magnitude(f);
        const double d_t = compute_reference_scale(config, percentile(mag.values(), kFlowPercentile));
        const ScalarMap hue = flow_to_hue(f);
        const ScalarMap v0 = pre_gate_value(mag, d_t, config.offset_fraction);

        Frame frame(width, height, 3);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double value = v0.at(x, y);
                if (gate_masks) value = std::clamp(value * (*gate_masks)[t].at(x, y), 0.0, 1.0);
                const auto bgr = hsv_to_bgr(hue.at(x, y), config.saturation, value);
                frame.at(x, y, 0) = bgr[2];
                frame.at(x, y, 1) = bgr[1];
                frame.at(x, y, 2) = bgr[0];
            }
        }
        out.push(std::move(frame));
    }
    return out;
}

FrameSequence encode_hsv_raw_video(const std::vector<FlowField>& flows,
                                   const NormalizationConfig& config,
                                   const std::vector<ScalarMap>* gate_masks) {
    if (flows.empty()) throw ValidationError("encode_hsv_raw_video: no flow fields");
    const int width = flows.front().width();
    const int height = flows.front().height();
    if (gate_masks) {
        if (gate_masks->size() != flows.size()) {
            throw ValidationError("encode_hsv_raw_video: gate mask count mismatch");
        }
        for (const ScalarMap& g : *gate_masks) {
            if (g.width() != width || g.height() != height) {
                throw ValidationError("encode_hsv_raw_video: gate mask dimensions mismatch");
            }
        }
    }
    FrameSequence out(width, height, 3);
    for (std::size_t t = 0; t < flows.size(); ++t) {
        const ScalarMap mag = flow_magnitude(flows[t]);
        const double d_t =
            compute_reference_scale(config, percentile(mag.values(), kFlowPercentile));
        const ScalarMap hue = flow_to_hue(flows[t]);
        const ScalarMap v0 = pre_gate_value(mag, d_t, config.offset_fraction);
        Frame frame(width, height, 3);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double value = v0.at(x, y);
                if (gate_masks) value = std::clamp(value * (*gate_masks)[t].at(x, y), 0.0, 1.0);
                const double hue_byte = std::fmod(std::round(hue.at(x, y) / 2.0), 180.0);
                frame.at(x, y, 0) = hue_byte / 255.0;
                frame.at(x, y, 1) = config.saturation;
                frame.at(x, y, 2) = value;
            }
        }
        out.push(std::move(frame));
    }
    return out;
}

FrameSequence flip_horizontal_with_hue_remap(const FrameSequence& encoded) {
    if (encoded.channels() != 3) {
        throw ValidationError("flip_horizontal_with_hue_remap: 3-channel input required");
    }
    FrameSequence out(encoded.width(), encoded.height(), 3, encoded.frame_rate());
    const int width = encoded.width();
    for (std::size_t t = 0; t < encoded.size(); ++t) {
        const Frame& src = encoded.frame(t);
        Frame dst(encoded.width(), encoded.height(), 3);
        for (int y = 0; y < encoded.height(); ++y) {
            for (int x = 0; x < width; ++x) {
                const int sx = width - 1 - x;
                const auto hsv = bgr_to_hsv(src.at(sx, y, 2), src.at(sx, y, 1), src.at(sx, y, 0));
                double h = std::fmod(180.0 - hsv[0] + 360.0, 360.0);
                const auto bgr = hsv_to_bgr(h, hsv[1], hsv[2]);
                dst.at(x, y, 0) = bgr[2];
                dst.at(x, y, 1) = bgr[1];
                dst.at(x, y, 2) = bgr[0];
            }
        }
        out.push(std::move(dst));
    }
    return out;
}

}  // namespace afv
