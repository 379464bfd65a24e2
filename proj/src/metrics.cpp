#include "afv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afv {

std::string to_string(Dataset d) {
    switch (d) {
        case Dataset::kRgb: return "RGB";
        case Dataset::kDenseNoise: return "DENSE_NOISE";
        case Dataset::kRandomDot: return "RANDOM_DOT";
    }
    return "RGB";
}

Dataset dataset_from_string(const std::string& s) {
    if (s == "RGB") return Dataset::kRgb;
    if (s == "DENSE_NOISE") return Dataset::kDenseNoise;
    if (s == "RANDOM_DOT") return Dataset::kRandomDot;
    throw ValidationError("unknown dataset tag '" + s +
                          "' (expected RGB, DENSE_NOISE or RANDOM_DOT)");
}

double top1_accuracy(const std::vector<PredictionRecord>& preds) {
    if (preds.empty()) throw ValidationError("top1_accuracy: no records");
    long long correct = 0;
    for (const auto& p : preds) correct += p.predicted_label == p.true_label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::vector<std::vector<long long>> confusion_matrix(
    const std::vector<PredictionRecord>& preds, int num_classes) {
    if (preds.empty()) throw ValidationError("confusion_matrix: no records");
    if (num_classes < 2) throw ValidationError("confusion_matrix: need at least 2 classes");
    std::vector<std::vector<long long>> counts(
        num_classes, std::vector<long long>(num_classes, 0));
    for (const auto& p : preds) {
        if (p.true_label < 0 || p.true_label >= num_classes || p.predicted_label < 0 ||
            p.predicted_label >= num_classes) {
            throw ValidationError("confusion_matrix: label out of range for video '" +
                                  p.video_id + "'");
        }
        counts[p.true_label][p.predicted_label] += 1;
    }
    return counts;
}

double transfer_score(double acc_dense, double acc_dot) {
    if (!(acc_dense >= 0.0 && acc_dense <= 1.0 && acc_dot >= 0.0 && acc_dot <= 1.0)) {
        throw ValidationError("transfer_score: accuracies must be in [0,1]");
    }
    return 0.5 * (acc_dense + acc_dot);
}

FlowErrorStats endpoint_error(const FlowField& flow_a, const FlowField& flow_b,
                              const ScalarMap* mask) {
    if (flow_a.width() != flow_b.width() || flow_a.height() != flow_b.height()) {
        throw ValidationError("endpoint_error: flow dimensions do not match");
    }
    if (mask && (mask->width() != flow_a.width() || mask->height() != flow_a.height())) {
        throw ValidationError("endpoint_error: mask dimensions do not match");
    }
    double weight_sum = 0.0, epe_sum = 0.0, ang_sum = 0.0;
    for (int y = 0; y < flow_a.height(); ++y) {
        for (int x = 0; x < flow_a.width(); ++x) {
            const double w = mask ? mask->at(x, y) : 1.0;
            if (w <= 0.0) continue;
            const double ua = flow_a.u(x, y), va = flow_a.v(x, y);
            const double ub = flow_b.u(x, y), vb = flow_b.v(x, y);
            const double du = ua - ub, dv = va - vb;
            epe_sum += w * std::sqrt(du * du + dv * dv);
            const double dot = ua * ub + va * vb + 1.0;
            const double na = std::sqrt(ua * ua + va * va + 1.0);
            const double nb = std::sqrt(ub * ub + vb * vb + 1.0);
            const double cosang = std::clamp(dot / (na * nb), -1.0, 1.0);
            ang_sum += w * std::acos(cosang) * (180.0 / std::numbers::pi);
            weight_sum += w;
        }
    }
    if (weight_sum <= 0.0) {
        throw ValidationError("endpoint_error: mask has no positive weight");
    }
    return {epe_sum / weight_sum, ang_sum / weight_sum};
}

}  // namespace afv
