// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. Informational checks print [INFO] and never
// fail the run (uncharacterized field conditions).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "uwoam/runner.hpp"
#include "uwoam/studies.hpp"

using namespace uwoam;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

void info(int idx, const std::string& name, const std::string& detail) {
    std::printf("[INFO] %2d. %-28s %s\n", idx, name.c_str(), detail.c_str());
}

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Grid overlap vs cos^2(dtheta/2) on a pi/8 lattice, 512^2 grid.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec grid{512, 0.1};
    const double waist = 0.01, lambda = 532e-9;
    double worst = 0.0;
    for (int ell : {1, 2, 3}) {
        std::vector<ComplexField> fields;
        for (int k = 0; k < 13; ++k)
            fields.push_back(
                superpose(SuperpositionSpec{ell, wrap_2pi(k * kPi / 8.0), 0.5}, grid, waist, lambda));
        for (int a = 0; a < 13; ++a)
            for (int b = 0; b < 13; ++b) {
                const double grid_fid = std::norm(overlap(fields[a], fields[b]));
                const double closed = analytic_fidelity(a * kPi / 8.0, b * kPi / 8.0);
                worst = std::max(worst, std::abs(grid_fid - closed));
            }
    }
    const double secs = now_seconds(t0);
    std::ostringstream d;
    d << "max |grid - closed form| = " << worst << " (tol 1e-3), 3x169 pairs in " << secs << " s";
    report(1, "analytic_fidelity_oracle", worst < 1e-3 && secs < 60.0, d.str());
}

// 2. Round-trip phase recovery, noiseless and calibrated-turbulence.
void criterion_2() {
    const GridSpec grid{256, 0.1};
    const DetectorSpec det{256, 0.1 / 256, 0.03, 1.0, 0.0, 0};
    double worst = 0.0;
    for (int ell : {1, 2, 3})
        for (int k = 0; k < 16; ++k) {
            const double theta = wrap_2pi(k * kPi / 8.0);
            const ComplexField f =
                superpose(SuperpositionSpec{ell, theta, 0.5}, grid, 0.01, 532e-9);
            const Frame frame = studies::render_noiseless_frame(f, det, 2e6);
            const PetalSet petals = segment_petals(frame, ell);
            if (!petals.accepted()) {
                worst = 1e9;
                continue;
            }
            worst = std::max(worst, angle_deviation(theta, orientation(petals), ell));
        }
    std::ostringstream d;
    d << "noiseless worst orientation error " << worst << " deg (tol 1 deg)";
    report(2, "round_trip_phase_recovery", worst < 1.0, d.str());

    studies::LinkSetup setup;
    const studies::FluctuationStudy turb = studies::fidelity_fluctuation_study(setup, 1, 0.0, 100, 77);
    std::ostringstream i;
    i << "calibrated-turbulence mean deviation " << turb.mean_deviation_deg
      << " deg vs published band [2.4, 11.0], average 7.2 deg (informational)";
    info(2, "round_trip_phase_recovery", i.str());
}

// 3. Loss budget.
void criterion_3() {
    const double db = channel_loss_db(0.16, 55.0);
    std::ostringstream d;
    d << "channel_loss_db(0.16, 55) = " << db << " dB (38.2 +- 0.05); residual to 'about 40 dB' = "
      << 40.0 - db << " dB (optics, documented)";
    report(3, "loss_budget", std::abs(db - 38.2) <= 0.05, d.str());
}

// 4. Photon budget, both paper readings.
void criterion_4() {
    SourceSpec low{1.898e-19, 532e-9, 1e-9, PureState{}};
    SourceSpec high{1.898e-10, 532e-9, 1e-9, PureState{}};
    const double rate = photon_budget(low).rate;
    const double per_ns = photon_budget(high).mean_per_slot;
    std::ostringstream d;
    d << "1.898e-19 W -> " << rate << " photons/s (0.508 +- 0.005); per-ns reading needs 1.898e-10 W -> "
      << per_ns << "/slot";
    report(4, "photon_budget", std::abs(rate - 0.508) <= 0.005 && std::abs(per_ns - 0.508) <= 0.005,
           d.str());
}

// 5. Crosstalk structure, noiseless and calibrated.
void criterion_5() {
    studies::LinkSetup clean;
    clean.channel.turbulence.cn2 = 0.0;
    clean.detector.background = 0.0;
    clean.detector.qe = 1.0;
    clean.expected_photons = 2e6;
    const studies::CrosstalkStudy noiseless = studies::crosstalk_study(clean, 1, 5);
    {
        std::ostringstream d;
        d << "noiseless diagonal min " << noiseless.min_diagonal << " (>0.999), orthogonal max "
          << noiseless.max_orthogonal << " (<1e-3)";
        report(5, "crosstalk_noiseless", noiseless.min_diagonal > 0.999 &&
                                             noiseless.max_orthogonal < 1e-3, d.str());
    }

    studies::LinkSetup setup;
    const studies::CrosstalkStudy noisy = studies::crosstalk_study(setup, 10, 2024);
    bool monotone = true;
    // Mean entry per |dtheta| bucket must fall off with the separation.
    std::vector<double> bucket(5, 0.0), count(5, 0.0);
    for (size_t i = 0; i < 8; ++i)
        for (size_t j = 0; j < 8; ++j) {
            int sep = static_cast<int>((i + 8 - j) % 8);
            sep = std::min(sep, 8 - sep);
            bucket[sep] += noisy.matrix.values[i][j];
            count[sep] += 1.0;
        }
    for (int s = 0; s < 5; ++s) bucket[s] /= count[s];
    for (int s = 1; s < 5; ++s) monotone = monotone && bucket[s] < bucket[s - 1];
    const double nn_target = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    std::ostringstream d;
    d << "calibrated diagonal min " << noisy.min_diagonal << " (>=0.96), next-neighbor "
      << noisy.mean_next_neighbor << " (" << nn_target << " +- 0.05), falloff "
      << (monotone ? "monotone" : "NOT monotone");
    report(5, "crosstalk_calibrated",
           noisy.min_diagonal >= 0.96 && monotone &&
               std::abs(noisy.mean_next_neighbor - nn_target) <= 0.05,
           d.str());
}

// 6. Fidelity fluctuation with the frozen cn2 default.
void criterion_6() {
    studies::LinkSetup setup;
    const studies::FluctuationStudy l3 = studies::fidelity_fluctuation_study(setup, 3, kPi / 4.0, 900, 102);
    {
        std::ostringstream d;
        d << "900-frame ell=3 fidelity std " << l3.fidelity_std * 100.0 << "% (< 1.1%), "
          << l3.failed << " gated frames (<= 1%)";
        report(6, "fluctuation_l3", l3.fidelity_std < 0.011 && l3.failed <= 9, d.str());
    }
    const studies::FluctuationStudy l1 = studies::fidelity_fluctuation_study(setup, 1, kPi / 4.0, 300, 100);
    std::ostringstream d;
    d << "300-frame ell=1 fidelity std " << l1.fidelity_std * 100.0 << "% (within [0.5%, 2.8%])";
    report(6, "fluctuation_l1", l1.fidelity_std >= 0.005 && l1.fidelity_std <= 0.028, d.str());
}

// 7. Vortex conservation over 100 weak-turbulence realizations.
void criterion_7() {
    studies::LinkSetup setup;
    setup.grid = GridSpec{256, setup.grid.extent};  // resolve few-pixel core splittings
    const studies::VortexStudy v = studies::vortex_conservation_study(setup, 3, 100, 4242);
    std::ostringstream d;
    d << v.split_into_unit_cores << "/100 with exactly 3 unit cores (>=95), " << v.winding_conserved
      << "/100 total winding +3 (=100), inter-core std " << v.inter_core_std
      << " px < wander std " << v.wander_std << " px";
    report(7, "vortex_conservation",
           v.split_into_unit_cores >= 95 && v.winding_conserved == 100 &&
               v.inter_core_std < v.wander_std,
           d.str());
}

// 8. Tip-tilt closed form and estimator recovery.
void criterion_8() {
    const double theta_urad = std::atan(0.64e-3 / 55.0) * 1e6;
    const studies::TipTiltStudy study = studies::tip_tilt_study(0.64e-3, 55.0, 2000, 31337);
    const double rel = std::abs(study.mean_radial - 0.64e-3) / 0.64e-3;
    std::ostringstream d;
    d << "arctan(0.64mm/55m) = " << theta_urad << " urad (11.64 +- 0.01); estimator recovers "
      << study.mean_radial * 1e3 << " mm (" << rel * 100.0 << "% off, tol 5%)";
    report(8, "tip_tilt", std::abs(theta_urad - 11.64) <= 0.01 && rel <= 0.05, d.str());
}

// 9. Byte-identical simulate outputs for a fixed master seed.
void criterion_9() {
    const fs::path base = fs::temp_directory_path() / "uwoam_acceptance_determinism";
    fs::remove_all(base);
    ExperimentConfig cfg = parse_config_text(R"(
[grid]
n = 128
extent = 0.1
[source]
power = 1.898e-10
waist = 0.01
[channel]
screens = 4
tilt_rms = 2e-6
[detector]
pixels = 128
pitch = 7.8125e-4
background = 0.02
[run]
master_seed = 99
frames_per_state = 3
expected_photons = 100000
[states]
state = superposition ell=1 theta_deg=45
state = pure ell=3
)");
    cfg.output_dir = (base / "a").string();
    run_experiment(cfg);
    cfg.output_dir = (base / "b").string();
    run_experiment(cfg);

    bool identical = true;
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext != ".pgm" && ext != ".csv") continue;
        const fs::path other = base / "b" / fs::relative(entry.path(), base / "a");
        std::ifstream fa(entry.path(), std::ios::binary), fb(other, std::ios::binary);
        std::string ca((std::istreambuf_iterator<char>(fa)), {});
        std::string cb((std::istreambuf_iterator<char>(fb)), {});
        identical = identical && !ca.empty() && ca == cb;
        ++compared;
    }
    std::ostringstream d;
    d << compared << " PGM/CSV files byte-compared across two runs";
    report(9, "determinism", identical && compared > 0, d.str());
    fs::remove_all(base);
}

// 10. Unitarity and extinction exactness.
void criterion_10() {
    const GridSpec grid{256, 0.1};
    const ComplexField f = lg_field(LGModeSpec{1, 0, 0.01, 532e-9}, grid);
    ComplexField g = f;
    double worst_drift = 0.0;
    for (int s = 0; s < 20; ++s) {
        const double before = g.norm2();
        g = propagate_step(g, 2.75, 532e-9);
        worst_drift = std::max(worst_drift, std::abs(g.norm2() - before));
    }

    ChannelSpec ch;  // c=0.16, L=55, turbulence off
    ch.turbulence.cn2 = 0.0;
    const ComplexField rx = transmit(f, ch, 0);
    const double transmittance = rx.norm2() / f.norm2();
    const double err = std::abs(transmittance - std::exp(-0.16 * 55.0));
    std::ostringstream d;
    d << "max per-step norm drift " << worst_drift << " (<1e-9); extinction error " << err
      << " (<1e-12)";
    report(10, "unitarity_energy", worst_drift < 1e-9 && err < 1e-12, d.str());
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("acceptance: %d failure(s), %.1f s total\n", g_failures, now_seconds(t0));
    return g_failures;
}
