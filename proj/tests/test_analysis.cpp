#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "uwoam/analysis.hpp"
#include "uwoam/channel.hpp"
#include "uwoam/studies.hpp"

using namespace uwoam;
namespace {

constexpr double kPi = std::numbers::pi;
const GridSpec kGrid{256, 0.1};
const DetectorSpec kDet{256, 0.1 / 256, 0.03, 1.0, 0.0, 0};
constexpr double kWaist = 0.01;
constexpr double kLambda = 532e-9;

Frame synth_frame(int ell, double theta) {
    const ComplexField f = superpose(SuperpositionSpec{ell, theta, 0.5}, kGrid, kWaist, kLambda);
    return studies::render_noiseless_frame(f, kDet, 2e6);
}

PetalSet petals_at(const std::vector<std::pair<double, double>>& centroids, int ell) {
    PetalSet p;
    p.ell = ell;
    p.centroids = centroids;
    p.found_count = static_cast<int>(centroids.size());
    double cx = 0.0, cy = 0.0;
    for (const auto& [x, y] : centroids) {
        cx += x;
        cy += y;
    }
    p.pattern_center = {cx / centroids.size(), cy / centroids.size()};
    return p;
}

}  // namespace

TEST_CASE("segmentation of a noiseless first-order pattern") {
    const PetalSet p = segment_petals(synth_frame(1, 0.0), 1);
    REQUIRE(p.accepted());
    REQUIRE(p.centroids.size() == 2);
    const double c = kDet.pixels / 2.0;
    // Two petals symmetric about the center, on the x-axis.
    for (const auto& [x, y] : p.centroids) CHECK(std::abs(y - c) < 1.0);
    const double x0 = p.centroids[0].first - c, x1 = p.centroids[1].first - c;
    CHECK(x0 * x1 < 0.0);
    CHECK(std::abs(x0 + x1) < 1.0);
}

TEST_CASE("segmentation of a noiseless third-order pattern") {
    const PetalSet p = segment_petals(synth_frame(3, 0.0), 3);
    REQUIRE(p.accepted());
    REQUIRE(p.centroids.size() == 6);
    std::vector<double> angles, radii;
    for (const auto& [x, y] : p.centroids) {
        const double dx = x - p.pattern_center.first, dy = y - p.pattern_center.second;
        angles.push_back(std::atan2(dy, dx));
        radii.push_back(std::hypot(dx, dy));
    }
    std::sort(angles.begin(), angles.end());
    for (size_t i = 1; i < angles.size(); ++i)
        CHECK(std::abs(angles[i] - angles[i - 1] - kPi / 3.0) < kPi / 180.0);
    const double rmean = std::accumulate(radii.begin(), radii.end(), 0.0) / radii.size();
    for (double r : radii) CHECK(r == doctest::Approx(rmean).epsilon(0.03));
}

TEST_CASE("segmentation failure paths") {
    Frame empty;
    empty.pixels = 64;
    empty.counts.assign(64 * 64, 0);
    const PetalSet p = segment_petals(empty, 1);
    CHECK_FALSE(p.accepted());
    CHECK(p.found_count == 0);

    // A first-order pattern only has 2 petals; asking for ell=3 fails.
    const PetalSet q = segment_petals(synth_frame(1, 0.0), 3);
    CHECK_FALSE(q.accepted());
    CHECK(q.found_count < 6);

    CHECK_THROWS_AS(segment_petals(empty, 0), std::invalid_argument);
    CHECK_THROWS_AS(segment_petals(empty, 1, 1.5), std::invalid_argument);
}

TEST_CASE("orientation estimator closed form") {
    // ell=1, centroids on the x-axis: angle 0, theta 0.
    const OrientationResult r0 = orientation(petals_at({{10.0, 0.0}, {-10.0, 0.0}}, 1));
    CHECK(r0.angle == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r0.theta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r0.quality == doctest::Approx(1.0));

    // ell=1 at 135/315 deg: angle 135 deg, theta 90 deg.
    const double c135 = std::cos(3.0 * kPi / 4.0), s135 = std::sin(3.0 * kPi / 4.0);
    const OrientationResult r1 =
        orientation(petals_at({{10 * c135, 10 * s135}, {-10 * c135, -10 * s135}}, 1));
    CHECK(r1.angle * 180.0 / kPi == doctest::Approx(135.0).epsilon(1e-9));
    CHECK(r1.theta * 180.0 / kPi == doctest::Approx(90.0).epsilon(1e-9));

    // ell=2, four centroids at 10/100/190/280 deg: angle 10, theta 320.
    std::vector<std::pair<double, double>> four;
    for (int k = 0; k < 4; ++k) {
        const double b = (10.0 + 90.0 * k) * kPi / 180.0;
        four.emplace_back(10 * std::cos(b), 10 * std::sin(b));
    }
    const OrientationResult r2 = orientation(petals_at(four, 2));
    CHECK(r2.angle * 180.0 / kPi == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(r2.theta * 180.0 / kPi == doctest::Approx(320.0).epsilon(1e-9));
}

TEST_CASE("orientation is permutation and rotation-fold invariant") {
    std::vector<std::pair<double, double>> pts = {{8.0, 1.0}, {-8.0, -1.0}};
    const OrientationResult a = orientation(petals_at(pts, 1));
    std::swap(pts[0], pts[1]);
    const OrientationResult b = orientation(petals_at(pts, 1));
    CHECK(a.angle == doctest::Approx(b.angle));
    CHECK(a.theta == doctest::Approx(b.theta));

    // Rotating every centroid by the pi/ell fold leaves the result fixed.
    std::vector<std::pair<double, double>> rot;
    for (const auto& [x, y] : pts) rot.emplace_back(-x, -y);
    const OrientationResult c = orientation(petals_at(rot, 1));
    CHECK(a.angle == doctest::Approx(c.angle));
}

TEST_CASE("round trip: synth -> segment -> orient recovers theta") {
    for (int ell : {1, 2, 3})
        for (int k = 0; k < 16; k += 5) {
            const double theta = wrap_2pi(k * kPi / 8.0);
            const PetalSet p = segment_petals(synth_frame(ell, theta), ell);
            REQUIRE(p.accepted());
            const OrientationResult r = orientation(p);
            CHECK(angle_deviation(theta, r, ell) < 1.0);
        }
}

TEST_CASE("angle deviation folding") {
    OrientationResult r;
    r.angle = 0.0;
    CHECK(angle_deviation(0.0, r, 1) == doctest::Approx(0.0));
    r.angle = 7.2 * kPi / 180.0;
    CHECK(angle_deviation(0.0, r, 1) == doctest::Approx(7.2));
    r.angle = 179.0 * kPi / 180.0;
    CHECK(angle_deviation(0.0, r, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("crosstalk matrix structure") {
    std::vector<double> sent;
    std::vector<OrientationResult> received;
    for (int k = 0; k < 8; ++k) {
        sent.push_back(k * kPi / 4.0);
        OrientationResult r;
        r.theta = sent.back();
        received.push_back(r);
    }
    const CrosstalkMatrix m = crosstalk(sent, received);
    const double nn = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    for (size_t i = 0; i < 8; ++i)
        for (size_t j = 0; j < 8; ++j) {
            CHECK(m.values[i][j] >= 0.0);
            CHECK(m.values[i][j] <= 1.0);
            // Symmetric in the phase difference.
            CHECK(m.values[i][j] == doctest::Approx(m.values[j][i]));
            if (i == j) CHECK(m.values[i][j] == doctest::Approx(1.0));
            if ((i + 4) % 8 == j) CHECK(m.values[i][j] == doctest::Approx(0.0).epsilon(1e-12));
            if ((i + 1) % 8 == j) CHECK(m.values[i][j] == doctest::Approx(nn));
        }
    CHECK_THROWS_AS(crosstalk({}, received), std::invalid_argument);
}

TEST_CASE("fidelity series on identical noiseless frames") {
    std::vector<Frame> frames(5, synth_frame(1, kPi / 4.0));
    const FidelitySeries s = fidelity_series(frames, SuperpositionSpec{1, kPi / 4.0, 0.5});
    CHECK(s.stddev < 1e-6);
    CHECK(s.mean > 0.999);
    CHECK(s.failed == 0);

    std::vector<Frame> bad(3);
    for (auto& f : bad) {
        f.pixels = 64;
        f.counts.assign(64 * 64, 0);
    }
    CHECK_THROWS(fidelity_series(bad, SuperpositionSpec{1, 0.0, 0.5}));
    CHECK_THROWS_AS(fidelity_series({frames[0]}, SuperpositionSpec{1, 0.0, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("field vortex detector on unperturbed modes") {
    const ComplexField f1 = lg_field(LGModeSpec{1, 0, kWaist, kLambda}, kGrid);
    const auto cores1 = find_vortices_field(f1, 0.02);
    REQUIRE(cores1.size() == 1);
    CHECK(cores1[0].charge == 1);
    CHECK(cores1[0].x == doctest::Approx(kGrid.n / 2.0).epsilon(0.01));
    CHECK(cores1[0].y == doctest::Approx(kGrid.n / 2.0).epsilon(0.01));

    const ComplexField f3 = lg_field(LGModeSpec{3, 0, kWaist, kLambda}, kGrid);
    const auto cores3 = find_vortices_field(f3, 0.02);
    int total = 0;
    for (const auto& c : cores3) total += c.charge;
    CHECK(total == 3);
    CHECK(cores3.size() == 1);  // degenerate core, one cluster

    const ComplexField f0 = lg_field(LGModeSpec{0, 0, kWaist, kLambda}, kGrid);
    CHECK(find_vortices_field(f0, 0.02).empty());
}

TEST_CASE("perturbed ell=3 splits into three unit cores") {
    const ComplexField f3 = lg_field(LGModeSpec{3, 0, kWaist, kLambda}, kGrid);
    ChannelSpec ch;
    ch.extinction = 0.0;
    ch.turbulence.cn2 = kCalibratedCn2;
    const ComplexField rx = transmit(f3, ch, 14);
    const auto cores = find_vortices_field(rx, rx.beam_radius());
    REQUIRE(cores.size() == 3);
    for (const auto& c : cores) CHECK(c.charge == 1);
}

TEST_CASE("frame vortex detector agrees with the field detector") {
    // Three unit vortices planted ~15 px apart inside a wide Gaussian:
    // separations the intensity-minimum method can genuinely resolve.
    const std::vector<std::pair<double, double>> planted = {
        {112.3, 127.6}, {134.8, 118.4}, {131.2, 140.7}};
    ComplexField f(kGrid);
    const double w = 0.025;
    for (int iy = 0; iy < kGrid.n; ++iy)
        for (int ix = 0; ix < kGrid.n; ++ix) {
            const double x = kGrid.coord(ix), y = kGrid.coord(iy);
            cplx a = std::exp(-(x * x + y * y) / (w * w));
            for (const auto& [px, py] : planted) {
                const double vx = kGrid.coord(0) + px * kGrid.pitch();
                const double vy = kGrid.coord(0) + py * kGrid.pitch();
                a *= cplx(x - vx, y - vy) / w;
            }
            f.at(ix, iy) = a;
        }
    f.normalize();

    const auto field_cores = find_vortices_field(f, 0.04);
    REQUIRE(field_cores.size() == 3);
    for (const auto& gc : field_cores) {
        CHECK(gc.charge == 1);
        double best = 1e9;
        for (const auto& [px, py] : planted) best = std::min(best, std::hypot(gc.x - px, gc.y - py));
        CHECK(best < 0.1);
    }

    const Frame frame = studies::render_noiseless_frame(f, kDet, 2e9);
    const auto frame_cores = find_vortices_frame(frame, 0.5);
    REQUIRE(frame_cores.size() == 3);
    for (const auto& fc : frame_cores) {
        double best = 1e9;
        for (const auto& gc : field_cores)
            best = std::min(best, std::hypot(fc.x - gc.x, fc.y - gc.y));
        CHECK(best < 1.5);  // sensor grid == field grid here
    }
}

TEST_CASE("frame vortex detector basics") {
    const ComplexField donut = lg_field(LGModeSpec{1, 0, kWaist, kLambda}, kGrid);
    const auto cores = find_vortices_frame(studies::render_noiseless_frame(donut, kDet, 1e6));
    REQUIRE(cores.size() == 1);
    CHECK(cores[0].x == doctest::Approx(kDet.pixels / 2.0).epsilon(0.02));
    CHECK(std::abs(cores[0].charge) == 1);

    Frame uniform;
    uniform.pixels = 64;
    uniform.counts.assign(64 * 64, 100);
    CHECK(find_vortices_frame(uniform).empty());
}

TEST_CASE("core tracking") {
    std::vector<VortexCore> base = {{10.0, 10.0, 1, 0}, {20.0, 10.0, 1, 0}, {15.0, 18.0, 1, 0}};

    // Static cores: constant trajectories.
    std::vector<std::vector<VortexCore>> still(5, base);
    const TrackSet ts = track_cores(still);
    REQUIRE(ts.trajectories.size() == 3);
    CHECK_FALSE(ts.discontinuity);
    for (const auto& traj : ts.trajectories) {
        REQUIRE(traj.size() == 5);
        for (const auto& [f, x, y] : traj) {
            CHECK(x == std::get<1>(traj[0]));
            CHECK(y == std::get<2>(traj[0]));
        }
    }

    // Rigid translation: inter-core distances stay constant even though
    // the per-frame core lists are shuffled.
    std::vector<std::vector<VortexCore>> moving;
    for (int f = 0; f < 6; ++f) {
        std::vector<VortexCore> cores = base;
        for (auto& c : cores) {
            c.x += 0.8 * f;
            c.y -= 0.3 * f;
        }
        std::rotate(cores.begin(), cores.begin() + (f % 3), cores.end());
        moving.push_back(cores);
    }
    const TrackSet tm = track_cores(moving);
    for (const auto& dists : tm.inter_core_distances) {
        REQUIRE(dists.size() == 3);
        for (size_t i = 0; i < 3; ++i)
            CHECK(dists[i] == doctest::Approx(tm.inter_core_distances[0][i]).epsilon(1e-9));
    }

    // Core-count change flags a discontinuity.
    std::vector<std::vector<VortexCore>> changing = {base, {base[0], base[1]}, {base[0], base[1]}};
    CHECK(track_cores(changing).discontinuity);

    CHECK_THROWS_AS(track_cores({{}}), std::invalid_argument);
}

TEST_CASE("tip tilt estimator") {
    // Two samples 1.28 mm apart: each deviates 0.64 mm from the mean.
    const std::vector<std::pair<double, double>> two = {{0.0, 0.0}, {1.28e-3, 0.0}};
    const TipTiltResult r = tip_tilt(two, 55.0);
    CHECK(std::abs(r.theta_x[0]) * 1e6 == doctest::Approx(11.64).epsilon(0.001));
    CHECK(r.mean_radial == doctest::Approx(0.64e-3));

    const std::vector<std::pair<double, double>> still(4, {1.0, 2.0});
    const TipTiltResult rs = tip_tilt(still, 55.0);
    for (double t : rs.theta_x) CHECK(t == 0.0);
    CHECK(rs.radial_rms == 0.0);

    // theta = pi/4 when the deviation equals the path length.
    const std::vector<std::pair<double, double>> wide = {{-55.0, 0.0}, {55.0, 0.0}};
    CHECK(std::abs(tip_tilt(wide, 55.0).theta_x[0]) == doctest::Approx(kPi / 4.0));

    // Small-angle linearity to 1e-6 relative.
    const double dx = 1e-3 * 55.0;
    const std::vector<std::pair<double, double>> small = {{-dx, 0.0}, {dx, 0.0}};
    const double t = std::abs(tip_tilt(small, 55.0).theta_x[0]);
    CHECK(t == doctest::Approx(dx / 55.0).epsilon(1e-6));

    CHECK_THROWS_AS(tip_tilt({{0.0, 0.0}}, 55.0), std::invalid_argument);
    CHECK_THROWS_AS(tip_tilt(two, 0.0), std::invalid_argument);
}
