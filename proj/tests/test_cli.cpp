#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "afv/frame_io.hpp"
#include "afv/flo_io.hpp"
#include "test_util.hpp"

using namespace afv;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

// Runs the installed CLI binary, capturing combined stdout/stderr.
CliResult run_cli(const std::string& args, const std::filesystem::path& log_dir) {
    static int counter = 0;
    const std::filesystem::path log = log_dir / ("cli_" + std::to_string(++counter) + ".log");
    const std::string cmd =
        std::string(AFV_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    r.output.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return r;
}

void write_video(const std::filesystem::path& dir, std::uint64_t seed, int frames, int dx) {
    const Frame base = testutil::make_texture(64, 64, seed);
    FrameSequence video(64, 64, 1);
    for (int t = 0; t < frames; ++t) video.push(testutil::translate_wrap(base, dx * t, 0));
    save_frames(video, dir);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("cli: flow -> encode -> synth round trip with deterministic reruns") {
    testutil::TempDir tmp("cli");
    write_video(tmp.path() / "frames", 7, 4, 2);

    auto flow = run_cli("flow --in " + (tmp.path() / "frames").string() + " --out " +
                            (tmp.path() / "flow").string(),
                        tmp.path());
    CHECK(flow.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.path() / "flow/flow_000002.flo"));

    auto encode = run_cli("encode --flows " + (tmp.path() / "flow").string() + " --out " +
                              (tmp.path() / "enc").string() + " --gate",
                          tmp.path());
    CHECK(encode.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.path() / "enc/frame_000002.png"));
    CHECK(!std::filesystem::exists(tmp.path() / "enc/frame_000003.png"));

    auto dots = run_cli("synth dots --flows " + (tmp.path() / "flow").string() + " --out " +
                            (tmp.path() / "dots").string() + " --seed 9",
                        tmp.path());
    CHECK(dots.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.path() / "dots/frame_000003.png"));

    auto noise = run_cli("synth noise --flows " + (tmp.path() / "flow").string() +
                             " --out " + (tmp.path() / "noise").string() + " --seed 9",
                         tmp.path());
    CHECK(noise.exit_code == 0);

    // Rerunning the stochastic stage with the same seed is byte-identical.
    auto noise2 = run_cli("synth noise --flows " + (tmp.path() / "flow").string() +
                              " --out " + (tmp.path() / "noise2").string() + " --seed 9",
                          tmp.path());
    CHECK(noise2.exit_code == 0);
    for (int t = 0; t < 4; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", t);
        CHECK(slurp(tmp.path() / "noise" / name) == slurp(tmp.path() / "noise2" / name));
    }

    // A different seed changes the dot placements.
    auto noise3 = run_cli("synth noise --flows " + (tmp.path() / "flow").string() +
                              " --out " + (tmp.path() / "noise3").string() + " --seed 10",
                          tmp.path());
    CHECK(noise3.exit_code == 0);
    CHECK(slurp(tmp.path() / "noise/frame_000000.png") !=
          slurp(tmp.path() / "noise3/frame_000000.png"));
}

TEST_CASE("cli: scale collect feeds encode via --scale-report") {
    testutil::TempDir tmp("cli_scale");
    write_video(tmp.path() / "train_v", 13, 4, 3);
    {
        std::ofstream out(tmp.path() / "manifest.csv");
        out << "video_id,class_label,split,source_path\n";
        out << "train_v,0,train," << (tmp.path() / "train_v").string() << "\n";
    }
    auto collect = run_cli("scale collect --manifest " +
                               (tmp.path() / "manifest.csv").string() + " --out " +
                               (tmp.path() / "scale.txt").string(),
                           tmp.path());
    CHECK(collect.exit_code == 0);
    CHECK(slurp(tmp.path() / "scale.txt").find("p_train = ") != std::string::npos);

    write_video(tmp.path() / "frames", 5, 3, 2);
    auto flow = run_cli("flow --in " + (tmp.path() / "frames").string() + " --out " +
                            (tmp.path() / "flow").string(),
                        tmp.path());
    REQUIRE(flow.exit_code == 0);
    auto encode = run_cli("encode --flows " + (tmp.path() / "flow").string() + " --out " +
                              (tmp.path() / "enc").string() + " --scale-report " +
                              (tmp.path() / "scale.txt").string(),
                          tmp.path());
    CHECK(encode.exit_code == 0);
}

TEST_CASE("cli: score and stats consume the bundled fixtures") {
    testutil::TempDir tmp("cli_score");
    {
        std::ofstream out(tmp.path() / "manifest.csv");
        out << "video_id,class_label,split,source_path\n";
        for (int i = 0; i < 10; ++i) {
            out << "v" << i << "," << i % 5 << ",test,/unused\n";
        }
    }
    {
        std::ofstream out(tmp.path() / "preds.csv");
        out << "video_id,dataset,true_label,predicted_label\n";
        for (int i = 0; i < 10; ++i) {
            out << "v" << i << ",DENSE_NOISE," << i % 5 << "," << i % 5 << "\n";
            out << "v" << i << ",RANDOM_DOT," << i % 5 << ","
                << (i < 5 ? i % 5 : (i + 1) % 5) << "\n";
        }
    }
    auto score = run_cli("score --predictions " + (tmp.path() / "preds.csv").string() +
                             " --manifest " + (tmp.path() / "manifest.csv").string() +
                             " --out " + (tmp.path() / "score.txt").string(),
                         tmp.path());
    CHECK(score.exit_code == 0);
    CHECK(score.output.find("Transfer Score") != std::string::npos);
    CHECK(slurp(tmp.path() / "score.txt").find("transfer_score = 0.750000") !=
          std::string::npos);

    const std::string responses =
        (std::filesystem::path(AFV_FIXTURE_DIR) / "responses_sample.csv").string();
    auto stats = run_cli("stats --responses " + responses +
                             " --pair DENSE_NOISE RANDOM_DOT --out " +
                             (tmp.path() / "stats.txt").string(),
                         tmp.path());
    CHECK(stats.exit_code == 0);
    CHECK(stats.output.find("F(2,42)") != std::string::npos);
    CHECK(slurp(tmp.path() / "stats.txt").find("friedman.chi_sq = ") != std::string::npos);
}

TEST_CASE("cli: exit codes for validation, io and degenerate-statistics errors") {
    testutil::TempDir tmp("cli_err");

    // Unknown subcommand / bad arguments -> 2.
    CHECK(run_cli("warp --in x", tmp.path()).exit_code == 2);

    // Missing input directory -> 3.
    auto missing = run_cli("flow --in " + (tmp.path() / "absent").string() + " --out " +
                               (tmp.path() / "flow").string(),
                           tmp.path());
    CHECK(missing.exit_code == 3);

    // Frame gap -> 3, naming the missing file.
    write_video(tmp.path() / "gapped", 3, 5, 1);
    std::filesystem::remove(tmp.path() / "gapped/frame_000002.png");
    auto gap = run_cli("flow --in " + (tmp.path() / "gapped").string() + " --out " +
                           (tmp.path() / "flow").string(),
                       tmp.path());
    CHECK(gap.exit_code == 3);
    CHECK(gap.output.find("frame_000002.png") != std::string::npos);

    // All-correct responses have zero variance everywhere -> 4.
    {
        std::ofstream out(tmp.path() / "allcorrect.csv");
        out << "participant,condition,trial,true_label,response,correct\n";
        for (int p = 0; p < 3; ++p) {
            for (const char* cond : {"A", "B"}) {
                for (int t = 0; t < 4; ++t) {
                    out << "p" << p << "," << cond << "," << t << ",x,x,1\n";
                }
            }
        }
    }
    auto degenerate =
        run_cli("stats --responses " + (tmp.path() / "allcorrect.csv").string(), tmp.path());
    CHECK(degenerate.exit_code == 4);
    CHECK(degenerate.output.find("error") != std::string::npos);

    // Config typo -> 2 with the line number.
    {
        std::ofstream out(tmp.path() / "bad.cfg");
        out << "[gate]\ntua = 0.3\n";
    }
    write_video(tmp.path() / "frames", 3, 2, 1);
    auto bad_cfg = run_cli("flow --in " + (tmp.path() / "frames").string() + " --out " +
                               (tmp.path() / "f2").string() + " --params " +
                               (tmp.path() / "bad.cfg").string(),
                           tmp.path());
    CHECK(bad_cfg.exit_code == 2);
    CHECK(bad_cfg.output.find("bad.cfg:2") != std::string::npos);
}

TEST_CASE("cli: run executes the stage DAG over a manifest") {
    testutil::TempDir tmp("cli_run");
    write_video(tmp.path() / "v1", 17, 3, 1);
    {
        std::ofstream out(tmp.path() / "manifest.csv");
        out << "video_id,class_label,split,source_path\n";
        out << "v1,0,test," << (tmp.path() / "v1").string() << "\n";
    }
    {
        std::ofstream out(tmp.path() / "run.cfg");
        out << "[dots]\ncount = 100\nseed = 3\n[noise]\nseed = 4\n";
        out << "[normalization]\nmix_weight = 0\n";
    }
    auto run = run_cli("run --config " + (tmp.path() / "run.cfg").string() + " --manifest " +
                           (tmp.path() / "manifest.csv").string() + " --out " +
                           (tmp.path() / "out").string() +
                           " --stages flow,encode,synth-dots,synth-noise",
                       tmp.path());
    CHECK(run.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.path() / "out/run_manifest.json"));
    CHECK(std::filesystem::exists(tmp.path() / "out/v1/encode/frame_000001.png"));
    CHECK(std::filesystem::exists(tmp.path() / "out/v1/dots/frame_000002.png"));

    // Stage without its upstream artifacts -> validation error (2).
    auto bad = run_cli("run --config " + (tmp.path() / "run.cfg").string() + " --manifest " +
                           (tmp.path() / "manifest.csv").string() + " --out " +
                           (tmp.path() / "fresh").string() + " --stages metrics",
                       tmp.path());
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("flow") != std::string::npos);
}
