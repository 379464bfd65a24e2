#pragma once

#include <string>
#include <vector>

#include "afv/core.hpp"

namespace afv {

// Evaluation datasets: source RGB videos and their two appearance-free
// transformations.
enum class Dataset { kRgb, kDenseNoise, kRandomDot };

std::string to_string(Dataset d);
Dataset dataset_from_string(const std::string& s);

struct PredictionRecord {
    std::string video_id;
    Dataset dataset = Dataset::kRgb;
    int true_label = 0;
    int predicted_label = 0;
};

// Fraction of records with predicted_label == true_label.
double top1_accuracy(const std::vector<PredictionRecord>& preds);

// counts[i][j] = records with true label i predicted as j.
std::vector<std::vector<long long>> confusion_matrix(
    const std::vector<PredictionRecord>& preds, int num_classes);

// Mean of the zero-shot accuracies on the two appearance-free sets.
double transfer_score(double acc_dense, double acc_dot);

struct FlowErrorStats {
    double mean_epe = 0.0;
    double mean_angular_error_deg = 0.0;
};

// Mean endpoint error and mean angular error (between (u,v,1)-augmented
// vectors) over the optionally weighted pixels.
FlowErrorStats endpoint_error(const FlowField& flow_a, const FlowField& flow_b,
                              const ScalarMap* mask = nullptr);

}  // namespace afv
