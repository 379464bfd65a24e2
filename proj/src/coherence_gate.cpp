#include "afv/coherence_gate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afv/flow_encoding.hpp"

namespace afv {

void validate_gate_params(const GateParams& p) {
    if (!(p.epsilon > 0.0)) throw ValidationError("GateParams.epsilon must be > 0");
    if (p.window < 1 || p.window % 2 == 0) {
        throw ValidationError("GateParams.window must be odd and >= 1");
    }
    if (!(p.tau >= 0.0 && p.tau < 1.0)) {
        throw ValidationError("GateParams.tau must be in [0,1)");
    }
    if (!(p.r_min >= 0.0)) throw ValidationError("GateParams.r_min must be >= 0");
    if (!(p.beta >= 0.0)) throw ValidationError("GateParams.beta must be >= 0");
    if (!(p.lambda >= 0.0 && p.lambda < 1.0)) {
        throw ValidationError("GateParams.lambda must be in [0,1)");
    }
}

UnitVectorField unit_flow(const FlowField& flow, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("unit_flow: epsilon must be > 0");
    UnitVectorField n(flow.width(), flow.height());
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            const double u = flow.u(x, y);
            const double v = flow.v(x, y);
            const double m = std::sqrt(u * u + v * v);
            n.nx(x, y) = u / (m + epsilon);
            n.ny(x, y) = v / (m + epsilon);
        }
    }
    return n;
}

ScalarMap coherence(const UnitVectorField& nfield, int window) {
    if (window < 1 || window % 2 == 0) {
        throw ValidationError("coherence: window must be odd and >= 1");
    }
    const int width = nfield.width(), height = nfield.height();
    std::vector<double> mean_x(nfield.nx_plane());
    std::vector<double> mean_y(nfield.ny_plane());
    if (window > 1) {
        std::vector<double> tmp(mean_x.size());
        detail::box_filter_plane(nfield.nx_plane().data(), tmp.data(), width, height, window);
        mean_x.swap(tmp);
        detail::box_filter_plane(nfield.ny_plane().data(), tmp.data(), width, height, window);
        mean_y.swap(tmp);
    }
    ScalarMap c(width, height);
    for (std::size_t i = 0; i < c.values().size(); ++i) {
        c.values()[i] = std::sqrt(mean_x[i] * mean_x[i] + mean_y[i] * mean_y[i]);
    }
    return c;
}

ScalarMap soft_threshold_coherence(const ScalarMap& c, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw ValidationError("soft_threshold_coherence: tau must be in [0,1)");
    }
    ScalarMap w(c.width(), c.height());
    const double inv = 1.0 / (1.0 - tau);
    for (std::size_t i = 0; i < c.values().size(); ++i) {
        w.values()[i] = std::clamp((c.values()[i] - tau) * inv, 0.0, 1.0);
    }
    return w;
}

ScalarMap magnitude_term(const ScalarMap& magnitude, double d_t, double r_min) {
    if (!(d_t > 0.0)) throw ValidationError("magnitude_term: d_t must be > 0");
    ScalarMap q(magnitude.width(), magnitude.height());
    for (std::size_t i = 0; i < q.values().size(); ++i) {
        const double ratio = magnitude.values()[i] / d_t;
        q.values()[i] = ratio >= r_min ? std::min(ratio, 1.0) : 0.0;
    }
    return q;
}

ScalarMap instantaneous_mask(const ScalarMap& q, const ScalarMap& w_c, double beta) {
    if (!(beta >= 0.0)) throw ValidationError("instantaneous_mask: beta must be >= 0");
    if (q.width() != w_c.width() || q.height() != w_c.height()) {
        throw ValidationError("instantaneous_mask: map dimensions mismatch");
    }
    ScalarMap g(q.width(), q.height());
    for (std::size_t i = 0; i < g.values().size(); ++i) {
        // std::pow(0,0) == 1, so beta = 0 reduces the mask to the magnitude term.
        g.values()[i] = q.values()[i] * std::pow(w_c.values()[i], beta);
    }
    return g;
}

ScalarMap ema_update(GateState& state, const ScalarMap& g_inst, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw ValidationError("ema_update: lambda must be in [0,1)");
    }
    if (!state.initialized) {
        state.g_prev = g_inst;
        state.initialized = true;
        return g_inst;
    }
    if (state.g_prev.width() != g_inst.width() || state.g_prev.height() != g_inst.height()) {
        throw ValidationError("ema_update: mask dimensions changed mid-video (" +
                              std::to_string(state.g_prev.width()) + "x" +
                              std::to_string(state.g_prev.height()) + " -> " +
                              std::to_string(g_inst.width()) + "x" +
                              std::to_string(g_inst.height()) + ")");
    }
    ScalarMap g(g_inst.width(), g_inst.height());
    const double blend = 1.0 - lambda;
    for (std::size_t i = 0; i < g.values().size(); ++i) {
        // Incremental form of lambda*g_prev + (1-lambda)*g_inst; a constant
        // input is an exact fixpoint.
        const double prev = state.g_prev.values()[i];
        g.values()[i] = prev + blend * (g_inst.values()[i] - prev);
    }
    state.g_prev = g;
    return g;
}

std::vector<ScalarMap> gate_video(const std::vector<FlowField>& flows,
                                  const std::vector<double>& d_ts,
                                  const GateParams& params) {
    validate_gate_params(params);
    if (d_ts.size() != flows.size()) {
        throw ValidationError("gate_video: d_ts count (" + std::to_string(d_ts.size()) +
                              ") does not match flow count (" + std::to_string(flows.size()) +
                              ")");
    }
    std::vector<ScalarMap> masks;
    masks.reserve(flows.size());
    GateState state;
    for (std::size_t t = 0; t < flows.size(); ++t) {
        const UnitVectorField n = unit_flow(flows[t], params.epsilon);
        const ScalarMap c = coherence(n, params.window);
        const ScalarMap w_c = soft_threshold_coherence(c, params.tau);
        const ScalarMap mag = flow_magnitude(flows[t]);
        const ScalarMap q = magnitude_term(mag, d_ts[t], params.r_min);
        const ScalarMap g_inst = instantaneous_mask(q, w_c, params.beta);
        masks.push_back(ema_update(state, g_inst, params.lambda));
    }
    return masks;
}

}  // namespace afv
