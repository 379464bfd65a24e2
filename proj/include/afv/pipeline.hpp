#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afv/config.hpp"
#include "afv/csv.hpp"
#include "afv/metrics.hpp"
#include "afv/statistics.hpp"

namespace afv {

// Pipeline stages. Dependency order: flow precedes everything else; the
// fidelity metrics stage needs the synthesized noise video as well.
enum class Stage { kFlow, kGate, kEncode, kSynthDots, kSynthNoise, kMetrics };

std::string to_string(Stage stage);
// Comma-separated list, e.g. "flow,encode,synth-dots". Unknown names are
// validation errors; duplicates collapse; result is in dependency order.
std::vector<Stage> parse_stages(const std::string& list);

// ---- training scale -------------------------------------------------------

struct ScaleReport {
    double p_train = 0.0;
    long long frame_pairs = 0;
    struct PerVideo {
        std::string video_id;
        int frame_pairs = 0;
        double mean_p95 = 0.0;
        double max_p95 = 0.0;
    };
    std::vector<PerVideo> videos;
    std::vector<std::string> skipped;  // unreadable videos, skipped with a warning
};

// Per-frame 95th-percentile flow magnitudes over every train-split video;
// p_train is their mean pooled over frames. Fails only if no video is usable.
ScaleReport collect_training_scale(const std::vector<ManifestEntry>& manifest,
                                   const FlowParams& flow_params, const IoConfig& io);

void write_scale_report(const ScaleReport& report, const std::filesystem::path& path);
double read_scale_report_p_train(const std::filesystem::path& path);

// ---- prediction scoring ---------------------------------------------------

struct DatasetScore {
    Dataset dataset = Dataset::kRgb;
    long long records = 0;
    double accuracy = 0.0;
    std::vector<std::vector<long long>> confusion;
};

struct ScoreReport {
    int num_classes = 0;
    std::vector<DatasetScore> per_dataset;
    std::optional<double> transfer;  // set when both appearance-free sets present
};

// Validates every record against the manifest (known video_id, matching true
// label, labels in range), then scores per dataset.
ScoreReport score_predictions(const std::vector<PredictionRecord>& preds,
                              const std::vector<ManifestEntry>& manifest);

std::string format_score_text(const ScoreReport& report);
std::string format_score_kv(const ScoreReport& report);

// ---- behavioral statistics ------------------------------------------------

struct PairedComparison {
    std::string group;  // order-group tag, or "all" without an order column
    int n = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    TTestResult test;
};

struct StatsReport {
    ConditionAccuracy accuracy;
    AnovaResult anova;
    FriedmanResult friedman;
    std::string pair_a, pair_b;               // set when pair tests requested
    std::vector<PairedComparison> paired;     // per order group
    std::optional<TTestResult> order_welch;   // A-B difference across 2 groups
};

// Accuracy matrix, repeated-measures ANOVA and Friedman test; when pair_a and
// pair_b name two conditions, paired t per order group plus a Welch t on the
// per-subject differences across the two order groups.
StatsReport analyze_responses(const ResponseTable& table, const std::string& pair_a = "",
                              const std::string& pair_b = "");

std::string format_stats_text(const StatsReport& report);
std::string format_stats_kv(const StatsReport& report);

// ---- full pipeline --------------------------------------------------------

struct RunOptions {
    std::filesystem::path out_root;
    std::vector<Stage> stages;
    int jobs = 1;
};

// Derivation of the per-video seed from the configured base seed.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& video_id);

// Runs the requested stages for every manifest video, writing per-video
// artifacts under out_root/<video_id>/<stage>/ and a run manifest with the
// config hash, seeds and per-file checksums at out_root/run_manifest.json.
// Outputs are deterministic given (config, manifest, seeds).
std::filesystem::path run_pipeline(const PipelineConfig& config,
                                   const std::vector<ManifestEntry>& manifest,
                                   const RunOptions& options);

}  // namespace afv
