#include <doctest.h>

#include <cmath>

#include "afv/farneback.hpp"
#include "test_util.hpp"

using namespace afv;

TEST_CASE("rgb_to_gray: Rec.601 coefficients") {
    Frame f(2, 2, 3);
    // white, red, mid-gray, arbitrary
    f.at(0, 0, 0) = 1.0; f.at(0, 0, 1) = 1.0; f.at(0, 0, 2) = 1.0;
    f.at(1, 0, 0) = 1.0; f.at(1, 0, 1) = 0.0; f.at(1, 0, 2) = 0.0;
    f.at(0, 1, 0) = 0.5; f.at(0, 1, 1) = 0.5; f.at(0, 1, 2) = 0.5;
    f.at(1, 1, 0) = 0.2; f.at(1, 1, 1) = 0.4; f.at(1, 1, 2) = 0.8;
    const Frame g = rgb_to_gray(f);
    CHECK(g.channels() == 1);
    CHECK(g.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.at(1, 0) == doctest::Approx(0.299).epsilon(1e-15));
    CHECK(g.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.at(1, 1) == doctest::Approx(0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.8).epsilon(1e-15));
}

TEST_CASE("estimate_flow: identical frames give near-zero flow") {
    const Frame a = testutil::make_texture(96, 80, 1001);
    const FlowField flow = estimate_flow(a, a);
    CHECK(testutil::interior_mean_magnitude(flow, 0) < 0.05);
}

TEST_CASE("estimate_flow: recovers synthetic translations") {
    const int cases[][2] = {{3, 0}, {-2, 1}};
    for (const auto& c : cases) {
        const Frame a = testutil::make_texture(128, 128, 42 + c[0] * 7 + c[1]);
        const Frame b = testutil::translate_wrap(a, c[0], c[1]);
        const FlowField flow = estimate_flow(a, b);
        CHECK(testutil::interior_mean_epe(flow, c[0], c[1], 16) < 0.3);
        for (const float v : flow.u_plane()) CHECK(std::isfinite(v));
        for (const float v : flow.v_plane()) CHECK(std::isfinite(v));
    }
}

TEST_CASE("estimate_flow: swapping frames approximately negates translation flow") {
    const Frame a = testutil::make_texture(128, 96, 77);
    const Frame b = testutil::translate_wrap(a, 3, -1);
    const FlowField fwd = estimate_flow(a, b);
    const FlowField bwd = estimate_flow(b, a);
    double sum = 0.0;
    long long n = 0;
    for (int y = 16; y < 96 - 16; ++y) {
        for (int x = 16; x < 128 - 16; ++x) {
            const double du = fwd.u(x, y) + bwd.u(x, y);
            const double dv = fwd.v(x, y) + bwd.v(x, y);
            sum += std::sqrt(du * du + dv * dv);
            ++n;
        }
    }
    CHECK(sum / n < 0.5);
}

TEST_CASE("estimate_flow: deterministic across runs") {
    const Frame a = testutil::make_texture(64, 64, 5);
    const Frame b = testutil::translate_wrap(a, 2, 1);
    const FlowField f1 = estimate_flow(a, b);
    const FlowField f2 = estimate_flow(a, b);
    CHECK(f1.u_plane() == f2.u_plane());
    CHECK(f1.v_plane() == f2.v_plane());
}

TEST_CASE("estimate_flow: dimension and parameter validation") {
    const Frame a = testutil::make_texture(32, 32, 9);
    const Frame b = testutil::make_texture(32, 24, 9);
    CHECK_THROWS_AS((void)estimate_flow(a, b), ValidationError);

    FlowParams too_deep;
    too_deep.levels = 6;  // 32 * 0.5^5 = 1 < poly_n
    CHECK_THROWS_AS((void)estimate_flow(a, a, too_deep), ValidationError);

    FlowParams bad;
    bad.window = 14;
    CHECK_THROWS_AS((void)estimate_flow(a, a, bad), ValidationError);
    bad = FlowParams{};
    bad.poly_n = 4;
    CHECK_THROWS_AS((void)estimate_flow(a, a, bad), ValidationError);
    bad = FlowParams{};
    bad.pyramid_scale = 1.0;
    CHECK_THROWS_AS((void)estimate_flow(a, a, bad), ValidationError);
}

TEST_CASE("estimate_flow: output bounded by pyramid reach even on unrelated frames") {
    const Frame a = testutil::make_texture(96, 96, 501);
    const Frame b = testutil::make_texture(96, 96, 502);  // no true correspondence
    const FlowParams params;
    const FlowField flow = estimate_flow(a, b, params);
    const double reach = static_cast<double>(params.levels) * params.window;
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            CHECK(std::isfinite(flow.u(x, y)));
            CHECK(std::isfinite(flow.v(x, y)));
            CHECK(std::fabs(flow.u(x, y)) < reach);
            CHECK(std::fabs(flow.v(x, y)) < reach);
        }
    }
}

TEST_CASE("estimate_flow: 3-channel frames are converted internally") {
    const Frame gray = testutil::make_texture(64, 64, 88);
    Frame rgb(64, 64, 3);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = gray.at(x, y);
        }
    }
    Frame rgb_shifted(64, 64, 3);
    const Frame shifted = testutil::translate_wrap(gray, 2, 0);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            for (int c = 0; c < 3; ++c) rgb_shifted.at(x, y, c) = shifted.at(x, y);
        }
    }
    const FlowField flow = estimate_flow(rgb, rgb_shifted);
    CHECK(testutil::interior_mean_epe(flow, 2.0, 0.0, 12) < 0.3);
}

TEST_CASE("estimate_video_flow: field count and static video") {
    const Frame base = testutil::make_texture(48, 48, 21);
    FrameSequence video(48, 48, 1);
    for (int i = 0; i < 5; ++i) video.push(base);
    const auto flows = estimate_video_flow(video);
    CHECK(flows.size() == 4);
    for (const auto& f : flows) {
        CHECK(testutil::interior_mean_magnitude(f, 0) < 0.05);
    }

    FrameSequence too_short(48, 48, 1);
    too_short.push(base);
    CHECK_THROWS_AS((void)estimate_video_flow(too_short), ValidationError);
}

TEST_CASE("estimate_video_flow: textured square moving over static textured background") {
    const int w = 128, h = 128;
    const Frame background = testutil::make_texture(w, h, 300, 2.0);
    const Frame patch = testutil::make_texture(w, h, 301, 1.2);

    FrameSequence video(w, h, 1);
    const int size = 40;
    const int y0 = 44;
    for (int t = 0; t < 4; ++t) {
        Frame f = background;
        const int x0 = 20 + 2 * t;  // square translates 2 px/frame rightward
        for (int y = y0; y < y0 + size; ++y) {
            for (int x = x0; x < x0 + size; ++x) {
                f.at(x, y) = patch.at(x - x0, y - y0);
            }
        }
        video.push(std::move(f));
    }
    const auto flows = estimate_video_flow(video);
    CHECK(flows.size() == 3);

    const FlowField& f0 = flows[0];
    // Inside the square (away from its boundary): flow ~ (2,0).
    double sq_sum = 0.0;
    long long sq_n = 0;
    for (int y = y0 + 10; y < y0 + size - 10; ++y) {
        for (int x = 20 + 10; x < 20 + size - 10; ++x) {
            const double du = f0.u(x, y) - 2.0;
            const double dv = f0.v(x, y);
            sq_sum += std::sqrt(du * du + dv * dv);
            ++sq_n;
        }
    }
    CHECK(sq_sum / sq_n < 0.5);

    // Background far from the square: flow ~ (0,0).
    double bg_sum = 0.0;
    long long bg_n = 0;
    for (int y = 8; y < 30; ++y) {
        for (int x = 90; x < 120; ++x) {
            bg_sum += std::sqrt(static_cast<double>(f0.u(x, y)) * f0.u(x, y) +
                                static_cast<double>(f0.v(x, y)) * f0.v(x, y));
            ++bg_n;
        }
    }
    CHECK(bg_sum / bg_n < 0.5);
}
