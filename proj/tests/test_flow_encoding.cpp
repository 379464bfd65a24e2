#include <doctest.h>

#include <cmath>

#include "afv/flow_encoding.hpp"
#include "afv/stimulus.hpp"
#include "test_util.hpp"

using namespace afv;

TEST_CASE("compute_reference_scale: weighted average and floor") {
    NormalizationConfig cfg;
    cfg.p_train = 10.0;
    cfg.mix_weight = 0.5;
    CHECK(compute_reference_scale(cfg, 6.0) == doctest::Approx(8.0).epsilon(1e-15));

    cfg.mix_weight = 1.0;
    CHECK(compute_reference_scale(cfg, 123.0) == doctest::Approx(10.0).epsilon(1e-15));

    cfg.mix_weight = 0.0;
    cfg.p_train = 0.0;
    CHECK(compute_reference_scale(cfg, 0.0) == kScaleFloor);

    cfg.mix_weight = 0.5;
    CHECK_THROWS_AS((void)compute_reference_scale(cfg, 1.0), ValidationError);
}

TEST_CASE("pre_gate_value: offset and clamping") {
    const double d_ts[] = {1.0, 0.37, 8.25};
    for (const double d : d_ts) {
        ScalarMap m(3, 1);
        m.at(0, 0) = d;          // exactly the reference scale
        m.at(1, 0) = 0.03 * d;   // offset exactly cancels
        m.at(2, 0) = 5.0 * d;    // clamps at 1
        const ScalarMap v = pre_gate_value(m, d, 0.03);
        CHECK(v.at(0, 0) == 0.97);
        CHECK(v.at(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(v.at(2, 0) == 1.0);
    }
}

TEST_CASE("flow_to_hue: axis conventions and quadrants") {
    FlowField f(4, 1);
    f.u(0, 0) = 1.0f;  f.v(0, 0) = 0.0f;
    f.u(1, 0) = 0.0f;  f.v(1, 0) = 1.0f;
    f.u(2, 0) = -1.0f; f.v(2, 0) = -1.0f;
    f.u(3, 0) = 0.0f;  f.v(3, 0) = 0.0f;
    const ScalarMap hue = flow_to_hue(f);
    CHECK(hue.at(0, 0) == doctest::Approx(0.0));
    CHECK(hue.at(1, 0) == doctest::Approx(90.0));
    CHECK(hue.at(2, 0) == doctest::Approx(225.0));
    CHECK(hue.at(3, 0) == 0.0);  // zero vector maps to hue 0 by convention
}

TEST_CASE("encode_hsv_video: zero flow encodes to black") {
    std::vector<FlowField> flows(3, testutil::constant_flow(8, 6, 0.0f, 0.0f));
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;
    const FrameSequence video = encode_hsv_video(flows, cfg);
    CHECK(video.size() == 3);
    for (std::size_t t = 0; t < video.size(); ++t) {
        for (const double v : video.frame(t).pixels()) CHECK(v == 0.0);
    }
}

TEST_CASE("encode_hsv_video: uniform rightward flow at the reference scale") {
    std::vector<FlowField> flows(1, testutil::constant_flow(8, 6, 3.0f, 0.0f));
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;  // d_t = frame p95 = 3.0
    const FrameSequence video = encode_hsv_video(flows, cfg);
    const Frame& f = video.frame(0);
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            CHECK(f.at(x, y, 0) == doctest::Approx(0.97).epsilon(1e-12));  // R
            CHECK(f.at(x, y, 1) == doctest::Approx(0.0).epsilon(1e-12));   // G
            CHECK(f.at(x, y, 2) == doctest::Approx(0.0).epsilon(1e-12));   // B
        }
    }
}

TEST_CASE("encode_hsv_video: frame count matches flow count") {
    std::vector<FlowField> flows;
    for (int i = 0; i < 12; ++i) flows.push_back(testutil::random_smooth_flow(16, 16, 40 + i));
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;
    CHECK(encode_hsv_video(flows, cfg).size() == 12);
}

TEST_CASE("encode_hsv_video: gate mask count must match") {
    std::vector<FlowField> flows(4, testutil::constant_flow(8, 8, 1.0f, 0.0f));
    std::vector<ScalarMap> masks(3, ScalarMap(8, 8, 1.0));
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;
    CHECK_THROWS_AS((void)encode_hsv_video(flows, cfg, &masks), ValidationError);
}

TEST_CASE("encode_hsv_video: value channel monotone in flow magnitude") {
    // Fixed d_t via p_train with full weight; increasing magnitude must not
    // decrease the encoded value (max of B,G,R equals the HSV value).
    NormalizationConfig cfg;
    cfg.p_train = 4.0;
    cfg.mix_weight = 1.0;
    double prev = -1.0;
    for (double mag = 0.0; mag <= 6.0; mag += 0.25) {
        std::vector<FlowField> flows(
            1, testutil::constant_flow(4, 4, static_cast<float>(mag), 0.0f));
        const FrameSequence video = encode_hsv_video(flows, cfg);
        const Frame& f = video.frame(0);
        const double value = std::max({f.at(2, 2, 0), f.at(2, 2, 1), f.at(2, 2, 2)});
        CHECK(value >= prev - 1e-12);
        prev = value;
    }
}

TEST_CASE("encode/decode round trip recovers direction and magnitude") {
    const FlowField flow = testutil::random_smooth_flow(24, 20, 99, 2.5);
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;
    const double d_t = compute_reference_scale(cfg, flow_percentile_magnitude(flow));
    const FrameSequence video = encode_hsv_video({flow}, cfg);
    const Frame& f = video.frame(0);
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            const auto hsv = bgr_to_hsv(f.at(x, y, 2), f.at(x, y, 1), f.at(x, y, 0));
            if (hsv[2] <= 0.05) continue;  // too dark to carry direction
            const double true_hue = flow_to_hue(flow).at(x, y);
            double dh = std::fabs(hsv[0] - true_hue);
            if (dh > 180.0) dh = 360.0 - dh;
            CHECK(dh <= 2.0);
            // value = clamp(m/d_t - offset) -> m = (value + offset) * d_t
            const double m_rec = (hsv[2] + cfg.offset_fraction) * d_t;
            const double u = flow.u(x, y), v = flow.v(x, y);
            const double m_true = std::sqrt(u * u + v * v);
            if (m_true < d_t) {  // below the clamp, magnitude is recoverable
                CHECK(m_rec == doctest::Approx(m_true).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("flip_horizontal_with_hue_remap: named hue mappings") {
    // One pixel per case: rightward (0), downward (90), 30 degrees.
    const double hues[] = {0.0, 90.0, 30.0};
    const double expected[] = {180.0, 90.0, 150.0};
    for (int i = 0; i < 3; ++i) {
        FrameSequence seq(1, 1, 3);
        Frame f(1, 1, 3);
        const auto bgr = hsv_to_bgr(hues[i], 1.0, 0.8);
        f.at(0, 0, 0) = bgr[2];
        f.at(0, 0, 1) = bgr[1];
        f.at(0, 0, 2) = bgr[0];
        seq.push(f);
        const FrameSequence flipped = flip_horizontal_with_hue_remap(seq);
        const Frame& g = flipped.frame(0);
        const auto hsv = bgr_to_hsv(g.at(0, 0, 2), g.at(0, 0, 1), g.at(0, 0, 0));
        CHECK(hsv[0] == doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK(hsv[2] == doctest::Approx(0.8).epsilon(1e-12));
    }
}

TEST_CASE("flip_horizontal_with_hue_remap: commutes with mirroring the flow") {
    for (int trial = 0; trial < 5; ++trial) {
        const FlowField flow = testutil::random_smooth_flow(22, 18, 500 + trial, 2.0);
        FlowField mirrored(flow.width(), flow.height());
        for (int y = 0; y < flow.height(); ++y) {
            for (int x = 0; x < flow.width(); ++x) {
                mirrored.u(x, y) = -flow.u(flow.width() - 1 - x, y);
                mirrored.v(x, y) = flow.v(flow.width() - 1 - x, y);
            }
        }
        NormalizationConfig cfg;
        cfg.mix_weight = 0.0;
        const FrameSequence path_a =
            flip_horizontal_with_hue_remap(encode_hsv_video({flow}, cfg));
        const FrameSequence path_b = encode_hsv_video({mirrored}, cfg);
        for (int y = 0; y < path_a.height(); ++y) {
            for (int x = 0; x < path_a.width(); ++x) {
                for (int c = 0; c < 3; ++c) {
                    const int qa = static_cast<int>(std::lround(path_a.frame(0).at(x, y, c) * 255.0));
                    const int qb = static_cast<int>(std::lround(path_b.frame(0).at(x, y, c) * 255.0));
                    CHECK(std::abs(qa - qb) <= 1);
                }
            }
        }
    }
}

TEST_CASE("encode_hsv_raw_video: hue byte convention round(h/2) in [0,179]") {
    NormalizationConfig cfg;
    cfg.mix_weight = 0.0;
    // Rightward flow: hue 0 -> byte 0; downward: hue 90 -> byte 45.
    const std::vector<FlowField> right(1, testutil::constant_flow(4, 4, 3.0f, 0.0f));
    const std::vector<FlowField> down(1, testutil::constant_flow(4, 4, 0.0f, 3.0f));
    const Frame fr = encode_hsv_raw_video(right, cfg).frame(0);
    const Frame fd = encode_hsv_raw_video(down, cfg).frame(0);
    CHECK(std::lround(fr.at(1, 1, 0) * 255.0) == 0);
    CHECK(std::lround(fd.at(1, 1, 0) * 255.0) == 45);
    CHECK(fr.at(1, 1, 1) == 1.0);                                   // saturation
    CHECK(fr.at(1, 1, 2) == doctest::Approx(0.97).epsilon(1e-12));  // value

    // Hue near 360 wraps into [0,179] rather than producing byte 180.
    FlowField almost(1, 1);
    almost.u(0, 0) = 1.0f;
    almost.v(0, 0) = -0.001f;  // hue just below 360
    const Frame fw = encode_hsv_raw_video({almost}, cfg).frame(0);
    CHECK(std::lround(fw.at(0, 0, 0) * 255.0) == 0);
}

TEST_CASE("flip_horizontal_with_hue_remap: requires 3 channels") {
    FrameSequence gray(4, 4, 1);
    gray.push(Frame(4, 4, 1));
    CHECK_THROWS_AS((void)flip_horizontal_with_hue_remap(gray), ValidationError);
}
