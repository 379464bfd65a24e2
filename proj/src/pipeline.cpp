#include "afv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "afv/coherence_gate.hpp"
#include "afv/farneback.hpp"
#include "afv/flo_io.hpp"
#include "afv/flow_encoding.hpp"
#include "afv/frame_io.hpp"
#include "afv/stimulus.hpp"
#include "io_util.hpp"

namespace afv {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::kFlow: return "flow";
        case Stage::kGate: return "gate";
        case Stage::kEncode: return "encode";
        case Stage::kSynthDots: return "synth-dots";
        case Stage::kSynthNoise: return "synth-noise";
        case Stage::kMetrics: return "metrics";
    }
    return "flow";
}

std::vector<Stage> parse_stages(const std::string& list) {
    std::set<Stage> stages;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        if (token == "flow") stages.insert(Stage::kFlow);
        else if (token == "gate") stages.insert(Stage::kGate);
        else if (token == "encode") stages.insert(Stage::kEncode);
        else if (token == "synth-dots") stages.insert(Stage::kSynthDots);
        else if (token == "synth-noise") stages.insert(Stage::kSynthNoise);
        else if (token == "metrics") stages.insert(Stage::kMetrics);
        else {
            throw ValidationError("unknown stage '" + token +
                                  "' (stages: flow, gate, encode, synth-dots, synth-noise, "
                                  "metrics)");
        }
    }
    if (stages.empty()) throw ValidationError("no stages requested");
    return {stages.begin(), stages.end()};
}

// ---- training scale --------------------------------------------------------

ScaleReport collect_training_scale(const std::vector<ManifestEntry>& manifest,
                                   const FlowParams& flow_params, const IoConfig& io) {
    ScaleReport report;
    double p95_sum = 0.0;
    long long p95_count = 0;
    bool any_train = false;
    for (const ManifestEntry& entry : manifest) {
        if (entry.split != "train") continue;
        any_train = true;
        std::vector<FlowField> flows;
        try {
            const FrameSequence frames = load_frames(entry.source_path, io.frame_pattern);
            flows = estimate_video_flow(frames, flow_params);
        } catch (const IoError& e) {
            report.skipped.push_back(entry.video_id + ": " + e.what());
            continue;
        }
        ScaleReport::PerVideo pv;
        pv.video_id = entry.video_id;
        pv.frame_pairs = static_cast<int>(flows.size());
        double sum = 0.0, mx = 0.0;
        for (const FlowField& f : flows) {
            const double p95 = flow_percentile_magnitude(f);
            sum += p95;
            mx = std::max(mx, p95);
            p95_sum += p95;
            ++p95_count;
        }
        pv.mean_p95 = flows.empty() ? 0.0 : sum / flows.size();
        pv.max_p95 = mx;
        report.videos.push_back(std::move(pv));
    }
    if (!any_train) {
        throw ValidationError("collect_training_scale: manifest has no train-split videos");
    }
    if (report.videos.empty()) {
        throw IoError("collect_training_scale: every training video was unreadable");
    }
    report.frame_pairs = p95_count;
    report.p_train = p95_sum / static_cast<double>(p95_count);
    return report;
}

void write_scale_report(const ScaleReport& report, const std::filesystem::path& path) {
    std::string text;
    text += "p_train = " + fmt(report.p_train) + "\n";
    text += "percentile = 0.95\n";
    text += "frame_pairs = " + std::to_string(report.frame_pairs) + "\n";
    text += "videos = " + std::to_string(report.videos.size()) + "\n";
    for (const auto& pv : report.videos) {
        text += "video." + pv.video_id + ".frame_pairs = " + std::to_string(pv.frame_pairs) + "\n";
        text += "video." + pv.video_id + ".mean_p95 = " + fmt(pv.mean_p95) + "\n";
        text += "video." + pv.video_id + ".max_p95 = " + fmt(pv.max_p95) + "\n";
    }
    for (const auto& s : report.skipped) text += "skipped = " + s + "\n";
    detail::atomic_write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

double read_scale_report_p_train(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scale report: " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
        if (key == "p_train") {
            try {
                return std::stod(line.substr(eq + 1));
            } catch (const std::exception&) {
                throw ValidationError("malformed p_train value in " + path.string());
            }
        }
    }
    throw ValidationError("no p_train entry in scale report " + path.string());
}

// ---- prediction scoring ----------------------------------------------------

ScoreReport score_predictions(const std::vector<PredictionRecord>& preds,
                              const std::vector<ManifestEntry>& manifest) {
    if (preds.empty()) throw ValidationError("score_predictions: no records");
    std::map<std::string, int> label_of;
    int num_classes = 0;
    for (const auto& e : manifest) {
        label_of[e.video_id] = e.class_label;
        num_classes = std::max(num_classes, e.class_label + 1);
    }
    if (num_classes < 2) {
        throw ValidationError("score_predictions: manifest must cover at least 2 classes");
    }
    std::map<Dataset, std::vector<PredictionRecord>> by_dataset;
    for (const auto& rec : preds) {
        const auto it = label_of.find(rec.video_id);
        if (it == label_of.end()) {
            throw ValidationError("score_predictions: unknown video_id '" + rec.video_id + "'");
        }
        if (rec.true_label != it->second) {
            throw ValidationError("score_predictions: true_label " +
                                  std::to_string(rec.true_label) + " for video '" +
                                  rec.video_id + "' contradicts the manifest (" +
                                  std::to_string(it->second) + ")");
        }
        if (rec.predicted_label < 0 || rec.predicted_label >= num_classes) {
            throw ValidationError("score_predictions: predicted_label out of range for video '" +
                                  rec.video_id + "'");
        }
        by_dataset[rec.dataset].push_back(rec);
    }

    ScoreReport report;
    report.num_classes = num_classes;
    std::optional<double> acc_dense, acc_dot;
    for (const auto& [dataset, records] : by_dataset) {
        DatasetScore score;
        score.dataset = dataset;
        score.records = static_cast<long long>(records.size());
        score.accuracy = top1_accuracy(records);
        score.confusion = confusion_matrix(records, num_classes);
        if (dataset == Dataset::kDenseNoise) acc_dense = score.accuracy;
        if (dataset == Dataset::kRandomDot) acc_dot = score.accuracy;
        report.per_dataset.push_back(std::move(score));
    }
    if (acc_dense && acc_dot) report.transfer = transfer_score(*acc_dense, *acc_dot);
    return report;
}

std::string format_score_text(const ScoreReport& report) {
    std::string out;
    for (const auto& ds : report.per_dataset) {
        out += to_string(ds.dataset) + ": top-1 accuracy " + fmt6(ds.accuracy) + " over " +
               std::to_string(ds.records) + " records\n";
        out += "  confusion (rows = true, cols = predicted):\n";
        for (int i = 0; i < report.num_classes; ++i) {
            out += "   ";
            for (int j = 0; j < report.num_classes; ++j) {
                out += " " + std::to_string(ds.confusion[i][j]);
            }
            out += "\n";
        }
    }
    if (report.transfer) {
        out += "Transfer Score (mean of DENSE_NOISE and RANDOM_DOT top-1): " +
               fmt6(*report.transfer) + "\n";
    }
    return out;
}

std::string format_score_kv(const ScoreReport& report) {
    std::string out;
    out += "classes = " + std::to_string(report.num_classes) + "\n";
    for (const auto& ds : report.per_dataset) {
        const std::string tag = to_string(ds.dataset);
        out += "dataset." + tag + ".records = " + std::to_string(ds.records) + "\n";
        out += "dataset." + tag + ".top1 = " + fmt6(ds.accuracy) + "\n";
        for (int i = 0; i < report.num_classes; ++i) {
            for (int j = 0; j < report.num_classes; ++j) {
                out += "confusion." + tag + "." + std::to_string(i) + "." + std::to_string(j) +
                       " = " + std::to_string(ds.confusion[i][j]) + "\n";
            }
        }
    }
    if (report.transfer) out += "transfer_score = " + fmt6(*report.transfer) + "\n";
    return out;
}

// ---- behavioral statistics --------------------------------------------------

StatsReport analyze_responses(const ResponseTable& table, const std::string& pair_a,
                              const std::string& pair_b) {
    StatsReport report;
    report.accuracy = accuracy_by_condition(table);
    report.anova = rm_anova(report.accuracy.accuracy);
    report.friedman = friedman_test(report.accuracy.accuracy);

    if (pair_a.empty() && pair_b.empty()) return report;
    if (pair_a.empty() || pair_b.empty()) {
        throw ValidationError("analyze_responses: both paired conditions must be named");
    }
    const auto& conds = report.accuracy.conditions;
    const auto find_cond = [&conds](const std::string& c) {
        const auto it = std::find(conds.begin(), conds.end(), c);
        if (it == conds.end()) {
            throw ValidationError("analyze_responses: unknown condition '" + c + "'");
        }
        return static_cast<int>(it - conds.begin());
    };
    const int col_a = find_cond(pair_a);
    const int col_b = find_cond(pair_b);
    report.pair_a = pair_a;
    report.pair_b = pair_b;

    // Order-group tag per participant (unique when the column is present).
    std::map<std::string, std::string> order_of;
    if (table.has_order) {
        for (const auto& row : table.rows) {
            const auto it = order_of.find(row.participant);
            if (it == order_of.end()) {
                order_of[row.participant] = row.order;
            } else if (it->second != row.order) {
                throw ValidationError("analyze_responses: participant '" + row.participant +
                                      "' has inconsistent order tags");
            }
        }
    }

    std::map<std::string, std::vector<int>> groups;  // order tag -> participant rows
    for (std::size_t i = 0; i < report.accuracy.participants.size(); ++i) {
        const std::string tag =
            table.has_order ? order_of[report.accuracy.participants[i]] : std::string("all");
        groups[tag].push_back(static_cast<int>(i));
    }

    std::vector<std::vector<double>> group_diffs;
    for (const auto& [tag, members] : groups) {
        PairedComparison cmp;
        cmp.group = tag;
        cmp.n = static_cast<int>(members.size());
        std::vector<double> a, b, d;
        for (int i : members) {
            a.push_back(report.accuracy.accuracy[i][col_a]);
            b.push_back(report.accuracy.accuracy[i][col_b]);
            d.push_back(a.back() - b.back());
        }
        double sa = 0.0, sb = 0.0;
        for (double v : a) sa += v;
        for (double v : b) sb += v;
        cmp.mean_a = sa / cmp.n;
        cmp.mean_b = sb / cmp.n;
        cmp.test = paired_t_test(a, b);
        report.paired.push_back(std::move(cmp));
        group_diffs.push_back(std::move(d));
    }
    if (group_diffs.size() == 2) {
        report.order_welch = welch_t_test(group_diffs[0], group_diffs[1]);
    }
    return report;
}

std::string format_stats_text(const StatsReport& report) {
    std::string out;
    out += "Accuracy by condition (mean +/- SD over " +
           std::to_string(report.accuracy.participants.size()) + " participants):\n";
    for (std::size_t j = 0; j < report.accuracy.conditions.size(); ++j) {
        out += "  " + report.accuracy.conditions[j] + ": " + fmt6(report.accuracy.mean[j]) +
               " +/- " + fmt6(report.accuracy.sd[j]) + "\n";
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "Repeated-measures ANOVA: F(%d,%d) = %.2f, p = %.4g, partial eta^2 = %.3f\n",
                  report.anova.df1, report.anova.df2, report.anova.f, report.anova.p,
                  report.anova.partial_eta_sq);
    out += buf;
    std::snprintf(buf, sizeof(buf), "Friedman test: chi^2(%d) = %.2f, p = %.4g\n",
                  report.friedman.df, report.friedman.chi_sq, report.friedman.p);
    out += buf;
    for (const auto& cmp : report.paired) {
        std::snprintf(buf, sizeof(buf),
                      "Paired t [%s, n=%d] %s (%.4f) vs %s (%.4f): t(%d) = %.2f, p = %.4g\n",
                      cmp.group.c_str(), cmp.n, report.pair_a.c_str(), cmp.mean_a,
                      report.pair_b.c_str(), cmp.mean_b, static_cast<int>(cmp.test.df),
                      cmp.test.t, cmp.test.p);
        out += buf;
    }
    if (report.order_welch) {
        std::snprintf(buf, sizeof(buf),
                      "Order-group difference (Welch): t = %.3f, df = %.2f, p = %.4g\n",
                      report.order_welch->t, report.order_welch->df, report.order_welch->p);
        out += buf;
    }
    return out;
}

std::string format_stats_kv(const StatsReport& report) {
    std::string out;
    out += "participants = " + std::to_string(report.accuracy.participants.size()) + "\n";
    std::string conds;
    for (const auto& c : report.accuracy.conditions) {
        if (!conds.empty()) conds += ",";
        conds += c;
    }
    out += "conditions = " + conds + "\n";
    for (std::size_t j = 0; j < report.accuracy.conditions.size(); ++j) {
        const std::string& c = report.accuracy.conditions[j];
        out += "accuracy." + c + ".mean = " + fmt(report.accuracy.mean[j]) + "\n";
        out += "accuracy." + c + ".sd = " + fmt(report.accuracy.sd[j]) + "\n";
    }
    out += "anova.f = " + fmt(report.anova.f) + "\n";
    out += "anova.df1 = " + std::to_string(report.anova.df1) + "\n";
    out += "anova.df2 = " + std::to_string(report.anova.df2) + "\n";
    out += "anova.p = " + fmt(report.anova.p) + "\n";
    out += "anova.partial_eta_sq = " + fmt(report.anova.partial_eta_sq) + "\n";
    out += "friedman.chi_sq = " + fmt(report.friedman.chi_sq) + "\n";
    out += "friedman.df = " + std::to_string(report.friedman.df) + "\n";
    out += "friedman.p = " + fmt(report.friedman.p) + "\n";
    for (const auto& cmp : report.paired) {
        const std::string tag = "paired." + cmp.group;
        out += tag + ".n = " + std::to_string(cmp.n) + "\n";
        out += tag + ".mean_a = " + fmt(cmp.mean_a) + "\n";
        out += tag + ".mean_b = " + fmt(cmp.mean_b) + "\n";
        out += tag + ".t = " + fmt(cmp.test.t) + "\n";
        out += tag + ".df = " + fmt(cmp.test.df) + "\n";
        out += tag + ".p = " + fmt(cmp.test.p) + "\n";
    }
    if (report.order_welch) {
        out += "welch.t = " + fmt(report.order_welch->t) + "\n";
        out += "welch.df = " + fmt(report.order_welch->df) + "\n";
        out += "welch.p = " + fmt(report.order_welch->p) + "\n";
    }
    return out;
}

// ---- full pipeline -----------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& video_id) {
    const std::uint64_t h = detail::fnv1a64(
        reinterpret_cast<const std::uint8_t*>(video_id.data()), video_id.size());
    return Rng::mix(base_seed ^ h);
}

namespace {

struct OutputRecord {
    std::string path;  // relative to out_root
    std::string checksum;
};

struct VideoOutputs {
    std::string video_id;
    std::vector<OutputRecord> outputs;
};

bool has_stage(const std::vector<Stage>& stages, Stage s) {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

FrameSequence masks_to_frames(const std::vector<ScalarMap>& masks) {
    FrameSequence seq(masks.front().width(), masks.front().height(), 1);
    for (const ScalarMap& m : masks) {
        Frame f(m.width(), m.height(), 1);
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) f.at(x, y) = m.at(x, y);
        }
        seq.push(std::move(f));
    }
    return seq;
}

void record_dir_outputs(const std::filesystem::path& out_root,
                        const std::filesystem::path& dir, VideoOutputs& rec) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        rec.outputs.push_back(
            {std::filesystem::relative(f, out_root).generic_string(),
             detail::checksum_string(detail::fnv1a64_file(f))});
    }
}

// Stage directories are rebuilt from scratch so a rerun can never leave
// stale frames from a previous longer video behind.
void reset_dir(const std::filesystem::path& dir) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
}

VideoOutputs process_video(const PipelineConfig& cfg, const ManifestEntry& entry,
                           const std::vector<Stage>& stages,
                           const std::filesystem::path& out_root) {
    VideoOutputs rec;
    rec.video_id = entry.video_id;
    const std::filesystem::path video_dir = out_root / entry.video_id;

    std::vector<FlowField> flows;
    bool flows_ready = false;
    const auto need_flows = [&](Stage consumer) {
        if (flows_ready) return;
        const std::filesystem::path flow_dir = video_dir / "flow";
        if (has_stage(stages, Stage::kFlow)) {
            const FrameSequence frames = load_frames(entry.source_path, cfg.io.frame_pattern);
            flows = estimate_video_flow(frames, cfg.flow);
            reset_dir(flow_dir);
            write_flo_sequence(flows, flow_dir, cfg.io.flow_pattern);
            record_dir_outputs(out_root, flow_dir, rec);
        } else if (std::filesystem::is_directory(flow_dir)) {
            flows = read_flo_sequence(flow_dir, cfg.io.flow_pattern);
        } else {
            throw ValidationError("stage '" + to_string(consumer) + "' needs flow artifacts: " +
                                  flow_dir.string() + " is missing; run stage 'flow' first");
        }
        flows_ready = true;
    };

    if (has_stage(stages, Stage::kFlow)) need_flows(Stage::kFlow);

    std::vector<ScalarMap> masks;
    bool masks_ready = false;
    const auto need_masks = [&]() {
        if (masks_ready) return;
        const auto d_ts = per_frame_reference_scales(flows, cfg.normalization);
        masks = gate_video(flows, d_ts, cfg.gate);
        masks_ready = true;
    };

    if (has_stage(stages, Stage::kGate)) {
        need_flows(Stage::kGate);
        need_masks();
        reset_dir(video_dir / "gate");
        save_frames(masks_to_frames(masks), video_dir / "gate", cfg.io.frame_pattern);
        record_dir_outputs(out_root, video_dir / "gate", rec);
    }
    if (has_stage(stages, Stage::kEncode)) {
        need_flows(Stage::kEncode);
        if (cfg.gate_enabled) need_masks();
        const FrameSequence enc = encode_hsv_video(flows, cfg.normalization,
                                                   cfg.gate_enabled ? &masks : nullptr);
        reset_dir(video_dir / "encode");
        save_frames(enc, video_dir / "encode", cfg.io.frame_pattern);
        record_dir_outputs(out_root, video_dir / "encode", rec);
    }
    if (has_stage(stages, Stage::kSynthDots)) {
        need_flows(Stage::kSynthDots);
        const FrameSequence dots =
            synthesize_dot_video(flows, cfg.dots.count, cfg.dots.lifetime,
                                 derive_seed(cfg.dots.seed, entry.video_id), cfg.dots.radius);
        reset_dir(video_dir / "dots");
        save_frames(dots, video_dir / "dots", cfg.io.frame_pattern);
        record_dir_outputs(out_root, video_dir / "dots", rec);
    }
    if (has_stage(stages, Stage::kSynthNoise)) {
        need_flows(Stage::kSynthNoise);
        const FrameSequence noise =
            synthesize_noise_video(flows, derive_seed(cfg.noise.seed, entry.video_id));
        reset_dir(video_dir / "noise");
        save_frames(noise, video_dir / "noise", cfg.io.frame_pattern);
        record_dir_outputs(out_root, video_dir / "noise", rec);
    }
    if (has_stage(stages, Stage::kMetrics)) {
        need_flows(Stage::kMetrics);
        const std::filesystem::path noise_dir = video_dir / "noise";
        if (!std::filesystem::is_directory(noise_dir)) {
            throw ValidationError("stage 'metrics' needs the synthesized noise video: " +
                                  noise_dir.string() +
                                  " is missing; run stage 'synth-noise' first");
        }
        // Motion-preservation fidelity: flow re-estimated from the noise
        // stimulus against the source flow.
        const FrameSequence noise = load_frames(noise_dir, cfg.io.frame_pattern);
        const auto reflows = estimate_video_flow(noise, cfg.flow);
        if (reflows.size() != flows.size()) {
            throw ValidationError("metrics: noise video frame count does not match flows");
        }
        std::string text;
        double epe_sum = 0.0, ang_sum = 0.0;
        for (std::size_t t = 0; t < flows.size(); ++t) {
            const FlowErrorStats stats = endpoint_error(reflows[t], flows[t]);
            epe_sum += stats.mean_epe;
            ang_sum += stats.mean_angular_error_deg;
            text += "frame." + std::to_string(t) + ".epe = " + fmt(stats.mean_epe) + "\n";
            text += "frame." + std::to_string(t) + ".angular_deg = " +
                    fmt(stats.mean_angular_error_deg) + "\n";
        }
        text = "frames = " + std::to_string(flows.size()) + "\n" +
               "mean_epe = " + fmt(epe_sum / flows.size()) + "\n" +
               "mean_angular_deg = " + fmt(ang_sum / flows.size()) + "\n" + text;
        const std::filesystem::path report_path = video_dir / "fidelity.txt";
        detail::atomic_write_bytes(report_path,
                                   std::vector<std::uint8_t>(text.begin(), text.end()));
        rec.outputs.push_back(
            {std::filesystem::relative(report_path, out_root).generic_string(),
             detail::checksum_string(detail::fnv1a64_file(report_path))});
    }

    std::sort(rec.outputs.begin(), rec.outputs.end(),
              [](const OutputRecord& a, const OutputRecord& b) { return a.path < b.path; });
    return rec;
}

}  // namespace

std::filesystem::path run_pipeline(const PipelineConfig& config,
                                   const std::vector<ManifestEntry>& manifest,
                                   const RunOptions& options) {
    validate_config(config);
    if (manifest.empty()) throw ValidationError("run_pipeline: empty manifest");
    if (options.stages.empty()) throw ValidationError("run_pipeline: no stages requested");
    if (options.jobs < 1) throw ValidationError("run_pipeline: jobs must be >= 1");
    std::filesystem::create_directories(options.out_root);

    std::vector<VideoOutputs> results(manifest.size());
    const int jobs = std::min<int>(options.jobs, static_cast<int>(manifest.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < manifest.size(); ++i) {
            results[i] = process_video(config, manifest[i], options.stages, options.out_root);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= manifest.size()) return;
                    try {
                        results[i] = process_video(config, manifest[i], options.stages,
                                                   options.out_root);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::sort(results.begin(), results.end(),
              [](const VideoOutputs& a, const VideoOutputs& b) {
                  return a.video_id < b.video_id;
              });

    nlohmann::json manifest_json;
    const std::string config_text = config_to_text(config);
    manifest_json["config_hash"] = detail::checksum_string(detail::fnv1a64(
        reinterpret_cast<const std::uint8_t*>(config_text.data()), config_text.size()));
    nlohmann::json stage_list = nlohmann::json::array();
    for (Stage s : options.stages) stage_list.push_back(to_string(s));
    manifest_json["stages"] = stage_list;
    manifest_json["seeds"] = {{"dots", config.dots.seed}, {"noise", config.noise.seed}};
    nlohmann::json videos = nlohmann::json::array();
    for (const auto& rec : results) {
        nlohmann::json v;
        v["video_id"] = rec.video_id;
        nlohmann::json outputs = nlohmann::json::array();
        for (const auto& out : rec.outputs) {
            outputs.push_back({{"path", out.path}, {"checksum", out.checksum}});
        }
        v["outputs"] = outputs;
        videos.push_back(v);
    }
    manifest_json["videos"] = videos;

    const std::filesystem::path manifest_path = options.out_root / "run_manifest.json";
    const std::string dumped = manifest_json.dump(2) + "\n";
    detail::atomic_write_bytes(manifest_path,
                               std::vector<std::uint8_t>(dumped.begin(), dumped.end()));
    return manifest_path;
}

}  // namespace afv
