// afv - appearance-free video toolkit
//
// Subcommands wire source frame directories through optical flow into HSV
// motion encodings, coherence-gate masks and appearance-free stimuli, and
// score/analyze recognition results. All outputs are deterministic given the
// config and seeds.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "afv/coherence_gate.hpp"
#include "afv/config.hpp"
#include "afv/csv.hpp"
#include "afv/farneback.hpp"
#include "afv/flo_io.hpp"
#include "afv/flow_encoding.hpp"
#include "afv/frame_io.hpp"
#include "afv/pipeline.hpp"
#include "afv/stimulus.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

afv::PipelineConfig load_params_or_default(const std::string& params_path) {
    if (params_path.empty()) return afv::PipelineConfig{};
    return afv::load_config(params_path);
}

void write_text_report(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) return;
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw afv::IoError("cannot open report file: " + out_path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"appearance-free video toolkit"};
    app.require_subcommand(1);

    // ---- flow ----
    auto* cmd_flow = app.add_subcommand("flow", "estimate dense optical flow for one video");
    std::string flow_in, flow_out, flow_params;
    cmd_flow->add_option("--in", flow_in, "input PNG frame directory")->required();
    cmd_flow->add_option("--out", flow_out, "output .flo directory")->required();
    cmd_flow->add_option("--params", flow_params, "config file");

    // ---- encode ----
    auto* cmd_encode = app.add_subcommand("encode", "render flow as an HSV motion video");
    std::string enc_flows, enc_out, enc_params, enc_scale_report, enc_raw_hsv;
    bool enc_gate = false;
    cmd_encode->add_option("--flows", enc_flows, "input .flo directory")->required();
    cmd_encode->add_option("--out", enc_out, "output PNG directory")->required();
    cmd_encode->add_flag("--gate", enc_gate, "attenuate the value channel with the coherence gate");
    cmd_encode->add_option("--scale-report", enc_scale_report,
                           "training scale report providing p_train");
    cmd_encode->add_option("--raw-hsv", enc_raw_hsv,
                           "also write raw HSV container frames to this directory");
    cmd_encode->add_option("--params", enc_params, "config file");

    // ---- synth ----
    auto* cmd_synth = app.add_subcommand("synth", "synthesize appearance-free stimuli");
    cmd_synth->require_subcommand(1);
    auto* cmd_dots = cmd_synth->add_subcommand("dots", "finite-lifetime random-dot video");
    auto* cmd_noise = cmd_synth->add_subcommand("noise", "dense warped-noise video");
    std::string synth_flows, synth_out, synth_params;
    std::uint64_t synth_seed = 1;
    for (CLI::App* c : {cmd_dots, cmd_noise}) {
        c->add_option("--flows", synth_flows, "input .flo directory")->required();
        c->add_option("--out", synth_out, "output PNG directory")->required();
        c->add_option("--seed", synth_seed, "RNG seed")->required();
        c->add_option("--params", synth_params, "config file");
    }

    // ---- scale ----
    auto* cmd_scale = app.add_subcommand("scale", "training-corpus normalization scale");
    cmd_scale->require_subcommand(1);
    auto* cmd_collect = cmd_scale->add_subcommand(
        "collect", "estimate flow over the train split and pool percentile magnitudes");
    std::string scale_manifest, scale_out, scale_params;
    cmd_collect->add_option("--manifest", scale_manifest, "video manifest CSV")->required();
    cmd_collect->add_option("--out", scale_out, "scale report output path")->required();
    cmd_collect->add_option("--params", scale_params, "config file");

    // ---- score ----
    auto* cmd_score = app.add_subcommand("score", "score a predictions CSV");
    std::string score_preds, score_manifest, score_out;
    cmd_score->add_option("--predictions", score_preds, "predictions CSV")->required();
    cmd_score->add_option("--manifest", score_manifest, "video manifest CSV")->required();
    cmd_score->add_option("--out", score_out, "write the machine-readable report here");

    // ---- stats ----
    auto* cmd_stats = app.add_subcommand("stats", "behavioral statistics from a responses CSV");
    std::string stats_responses, stats_out;
    std::vector<std::string> stats_pair;
    cmd_stats->add_option("--responses", stats_responses, "responses CSV")->required();
    cmd_stats->add_option("--pair", stats_pair,
                          "two condition names for paired/Welch t tests")
        ->expected(2);
    cmd_stats->add_option("--out", stats_out, "write the machine-readable report here");

    // ---- run ----
    auto* cmd_run = app.add_subcommand("run", "run pipeline stages over a manifest");
    std::string run_config, run_manifest, run_out, run_stages;
    int run_jobs = 1;
    cmd_run->add_option("--config", run_config, "config file")->required();
    cmd_run->add_option("--manifest", run_manifest, "video manifest CSV")->required();
    cmd_run->add_option("--out", run_out, "output root directory")->required();
    cmd_run->add_option("--stages", run_stages,
                        "comma-separated: flow,gate,encode,synth-dots,synth-noise,metrics")
        ->required();
    cmd_run->add_option("--jobs", run_jobs, "parallel videos (default 1)");

    try {
        app.parse(argc, argv);

        if (*cmd_flow) {
            const afv::PipelineConfig cfg = load_params_or_default(flow_params);
            const afv::FrameSequence frames = afv::load_frames(flow_in, cfg.io.frame_pattern);
            const auto flows = afv::estimate_video_flow(frames, cfg.flow);
            afv::write_flo_sequence(flows, flow_out, cfg.io.flow_pattern);
            std::printf("wrote %zu flow fields to %s\n", flows.size(), flow_out.c_str());
        } else if (*cmd_encode) {
            afv::PipelineConfig cfg = load_params_or_default(enc_params);
            if (!enc_scale_report.empty()) {
                cfg.normalization.p_train = afv::read_scale_report_p_train(enc_scale_report);
            } else if (cfg.normalization.p_train <= 0.0) {
                // Without a corpus scale the frame percentile is used alone.
                cfg.normalization.mix_weight = 0.0;
            }
            const auto flows = afv::read_flo_sequence(enc_flows, cfg.io.flow_pattern);
            std::vector<afv::ScalarMap> masks;
            const std::vector<afv::ScalarMap>* mask_ptr = nullptr;
            if (enc_gate) {
                const auto d_ts = afv::per_frame_reference_scales(flows, cfg.normalization);
                masks = afv::gate_video(flows, d_ts, cfg.gate);
                mask_ptr = &masks;
            }
            const afv::FrameSequence enc =
                afv::encode_hsv_video(flows, cfg.normalization, mask_ptr);
            afv::save_frames(enc, enc_out, cfg.io.frame_pattern);
            if (!enc_raw_hsv.empty()) {
                afv::save_frames(afv::encode_hsv_raw_video(flows, cfg.normalization, mask_ptr),
                                 enc_raw_hsv, cfg.io.frame_pattern);
            }
            std::printf("wrote %zu encoded frames to %s\n", enc.size(), enc_out.c_str());
        } else if (*cmd_dots || *cmd_noise) {
            const afv::PipelineConfig cfg = load_params_or_default(synth_params);
            const auto flows = afv::read_flo_sequence(synth_flows, cfg.io.flow_pattern);
            afv::FrameSequence video;
            if (*cmd_dots) {
                video = afv::synthesize_dot_video(flows, cfg.dots.count, cfg.dots.lifetime,
                                                  synth_seed, cfg.dots.radius);
            } else {
                video = afv::synthesize_noise_video(flows, synth_seed);
            }
            afv::save_frames(video, synth_out, cfg.io.frame_pattern);
            std::printf("wrote %zu frames to %s\n", video.size(), synth_out.c_str());
        } else if (*cmd_collect) {
            const afv::PipelineConfig cfg = load_params_or_default(scale_params);
            const auto manifest = afv::load_manifest(scale_manifest);
            const afv::ScaleReport report =
                afv::collect_training_scale(manifest, cfg.flow, cfg.io);
            for (const auto& s : report.skipped) {
                std::fprintf(stderr, "warning: skipped unreadable video %s\n", s.c_str());
            }
            afv::write_scale_report(report, scale_out);
            std::printf("p_train = %.9g over %lld frame pairs (%zu videos)\n", report.p_train,
                        report.frame_pairs, report.videos.size());
        } else if (*cmd_score) {
            const auto preds = afv::load_predictions(score_preds);
            const auto manifest = afv::load_manifest(score_manifest);
            const afv::ScoreReport report = afv::score_predictions(preds, manifest);
            std::fputs(afv::format_score_text(report).c_str(), stdout);
            write_text_report(afv::format_score_kv(report), score_out);
        } else if (*cmd_stats) {
            const afv::ResponseTable table = afv::load_responses(stats_responses);
            const std::string pair_a = stats_pair.size() == 2 ? stats_pair[0] : "";
            const std::string pair_b = stats_pair.size() == 2 ? stats_pair[1] : "";
            const afv::StatsReport report = afv::analyze_responses(table, pair_a, pair_b);
            std::fputs(afv::format_stats_text(report).c_str(), stdout);
            write_text_report(afv::format_stats_kv(report), stats_out);
        } else if (*cmd_run) {
            const afv::PipelineConfig cfg = afv::load_config(run_config);
            const auto manifest = afv::load_manifest(run_manifest);
            afv::RunOptions options;
            options.out_root = run_out;
            options.stages = afv::parse_stages(run_stages);
            options.jobs = run_jobs;
            const auto manifest_path = afv::run_pipeline(cfg, manifest, options);
            std::printf("run manifest: %s\n", manifest_path.string().c_str());
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    } catch (const afv::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const afv::DegenerateStatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const afv::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
