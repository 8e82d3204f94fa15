#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "uwoam/detector.hpp"
#include "uwoam/modes.hpp"

using namespace uwoam;
namespace {
const GridSpec kGrid{128, 0.1};
const DetectorSpec kDet{128, 0.1 / 128, 0.03, 0.5, 0.0, 1234};
constexpr double kLambda = 532e-9;
}

TEST_CASE("zero expected photons and zero background give an empty frame") {
    const ComplexField f = lg_field(LGModeSpec{1, 0, 0.01, kLambda}, kGrid);
    const Frame frame = capture_frame(f, kDet, 0.0, 0);
    CHECK(frame.total() == 0);
    CHECK_THROWS_AS(capture_frame(f, kDet, -1.0, 0), std::invalid_argument);
}

TEST_CASE("frames are deterministic per (seed, frame_index)") {
    const ComplexField f = lg_field(LGModeSpec{1, 0, 0.01, kLambda}, kGrid);
    const Frame a = capture_frame(f, kDet, 1e4, 5);
    const Frame b = capture_frame(f, kDet, 1e4, 5);
    CHECK(a.counts == b.counts);
    const Frame c = capture_frame(f, kDet, 1e4, 6);
    CHECK(a.counts != c.counts);
}

TEST_CASE("mean detected counts equal qe * expected_photons") {
    const ComplexField f = lg_field(LGModeSpec{0, 0, 0.01, kLambda}, kGrid);
    const double expected_photons = 5000.0;
    double total = 0.0;
    const int n_frames = 100;
    for (int i = 0; i < n_frames; ++i) total += capture_frame(f, kDet, expected_photons, i).total();
    const double mean = total / n_frames;
    const double target = kDet.qe * expected_photons;
    // 3 sigma on the mean of n_frames Poisson totals.
    CHECK(std::abs(mean - target) < 3.0 * std::sqrt(target / n_frames) + 0.05 * target);
}

TEST_CASE("linearity: doubling the flux doubles the counts") {
    const ComplexField f = lg_field(LGModeSpec{0, 0, 0.01, kLambda}, kGrid);
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < 50; ++i) {
        t1 += capture_frame(f, kDet, 2000.0, i).total();
        t2 += capture_frame(f, kDet, 4000.0, 1000 + i).total();
    }
    CHECK(t2 / t1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("per-pixel variance matches the Poisson mean") {
    const ComplexField f = lg_field(LGModeSpec{0, 0, 0.015, kLambda}, kGrid);
    const int n_frames = 500;
    std::vector<double> sum(kDet.pixels * kDet.pixels, 0.0), sum2(sum.size(), 0.0);
    for (int i = 0; i < n_frames; ++i) {
        const Frame frame = capture_frame(f, kDet, 2e5, i);
        for (size_t p = 0; p < sum.size(); ++p) {
            sum[p] += frame.counts[p];
            sum2[p] += static_cast<double>(frame.counts[p]) * frame.counts[p];
        }
    }
    double ratio_sum = 0.0;
    int considered = 0;
    for (size_t p = 0; p < sum.size(); ++p) {
        const double mean = sum[p] / n_frames;
        if (mean < 20.0) continue;
        const double var = (sum2[p] - sum[p] * sum[p] / n_frames) / (n_frames - 1);
        ratio_sum += var / mean;
        ++considered;
    }
    REQUIRE(considered > 100);
    const double mean_ratio = ratio_sum / considered;
    CHECK(mean_ratio > 0.9);
    CHECK(mean_ratio < 1.1);
}

TEST_CASE("counts are zero where the field is dark") {
    // Background off: the ell=3 core and the far corners must stay empty.
    const ComplexField f = lg_field(LGModeSpec{3, 0, 0.01, kLambda}, kGrid);
    const Frame frame = capture_frame(f, kDet, 1e6, 0);
    CHECK(frame.at(kDet.pixels / 2, kDet.pixels / 2) == 0);
    CHECK(frame.at(0, 0) == 0);
    CHECK(frame.at(kDet.pixels - 1, kDet.pixels - 1) == 0);
}

TEST_CASE("capture_sequence timestamps and length") {
    const ComplexField f = lg_field(LGModeSpec{1, 0, 0.01, kLambda}, kGrid);
    const auto frames = capture_sequence([&](int) { return f; }, kDet, 100.0, 900);
    CHECK(frames.size() == 900);
    CHECK(frames.front().timestamp == 0.0);
    CHECK(frames.back().timestamp == doctest::Approx(26.97));
    CHECK_THROWS_AS(capture_sequence([&](int) { return f; }, kDet, 100.0, 0),
                    std::invalid_argument);

    const auto single = capture_sequence([&](int) { return f; }, kDet, 100.0, 1);
    CHECK(single.size() == 1);
    CHECK(single[0].timestamp == 0.0);
}

TEST_CASE("pgm round trip is bit exact") {
    const ComplexField f = lg_field(LGModeSpec{2, 0, 0.01, kLambda}, kGrid);
    const Frame frame = capture_frame(f, kDet, 5e4, 3);
    const std::string path =
        (std::filesystem::temp_directory_path() / "uwoam_test_frame.pgm").string();
    write_pgm16(path, frame);
    const Frame back = read_pgm16(path);
    CHECK(back.pixels == frame.pixels);
    CHECK(back.counts == frame.counts);
    std::remove(path.c_str());
}

TEST_CASE("detector spec validation") {
    DetectorSpec det = kDet;
    det.pixels = 16;
    CHECK_THROWS_AS(det.validate(), std::invalid_argument);
    det = kDet;
    det.qe = 1.5;
    CHECK_THROWS_AS(det.validate(), std::invalid_argument);
    det = kDet;
    det.exposure = 0.0;
    CHECK_THROWS_AS(det.validate(), std::invalid_argument);
}
