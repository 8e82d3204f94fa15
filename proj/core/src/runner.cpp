#include "uwoam/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "uwoam/rng.hpp"
#include "uwoam/studies.hpp"

namespace uwoam {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "uwoam 1.0.0";

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path);
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

uint64_t frame_seed(uint64_t master_seed, int state_index, int frame_index) {
    return mix64(master_seed, static_cast<uint64_t>(state_index),
                 static_cast<uint64_t>(frame_index));
}

std::string RunManifest::to_text() const {
    std::ostringstream out;
    out << "[manifest]\nversion = " << version << "\nmaster_seed = " << master_seed
        << "\nwall_seconds = " << format_double(wall_seconds) << "\n\n";
    for (const StateSummary& s : states) {
        out << "[state." << s.label << "]\n";
        if (!std::isnan(s.sent_theta))
            out << "sent_theta_deg = " << format_double(s.sent_theta * 180.0 / kPi) << "\n";
        out << "frames = " << s.frames << "\nfailed = " << s.failed << "\n";
        if (!std::isnan(s.sent_theta)) {
            out << "mean_fidelity = " << format_double(s.mean_fidelity) << "\n";
            out << "fidelity_std = " << format_double(s.fidelity_std) << "\n";
            out << "mean_deviation_deg = " << format_double(s.mean_deviation_deg) << "\n";
        }
        out << "\n";
    }
    out << "[files]\n";
    for (const auto& [path, checksum] : files)
        out << path << " = " << std::hex << std::setw(16) << std::setfill('0') << checksum
            << std::dec << std::setfill(' ') << "\n";
    out << "\n[config]\n" << config_echo;
    return out.str();
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const ValidationReport report = validate_config(cfg);
    if (!report.ok()) throw std::runtime_error(report.to_string());

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    RunManifest manifest;
    manifest.version = kVersion;
    manifest.master_seed = cfg.master_seed;
    manifest.config_echo = config_to_text(cfg);

    const double expected = cfg.resolved_expected_photons();
    std::vector<double> sent_phases;
    std::vector<OrientationResult> received_means;

    for (size_t si = 0; si < cfg.sent_states.size(); ++si) {
        const auto& state = cfg.sent_states[si];
        SourceSpec src = cfg.source;
        src.state = state;
        const ComplexField field0 = emit(src, cfg.grid, cfg.waist);

        const bool is_sup = std::holds_alternative<SuperpositionSpec>(state);
        const int ell = is_sup ? std::abs(std::get<SuperpositionSpec>(state).ell)
                               : std::abs(std::get<PureState>(state).ell);

        StateSummary summary;
        summary.sent_theta =
            is_sup ? std::get<SuperpositionSpec>(state).theta : std::nan("");
        {
            std::ostringstream label;
            label << si << (is_sup ? "_sup" : "_pure") << "_ell"
                  << (is_sup ? std::get<SuperpositionSpec>(state).ell
                             : std::get<PureState>(state).ell);
            summary.label = label.str();
        }
        summary.frames = cfg.frames_per_state;

        const fs::path state_dir = fs::path(cfg.output_dir) / ("state_" + summary.label);
        fs::create_directories(state_dir);

        std::ostringstream orient_csv;
        orient_csv << "frame,angle_deg,theta_deg,quality\n";
        std::ostringstream traj_csv;
        traj_csv << "frame,core_id,x,y\n";

        std::vector<std::vector<VortexCore>> per_frame_cores;
        std::vector<std::pair<double, double>> centers_m;  // beam centers [m] for tip-tilt
        cplx theta_resultant = 0.0;
        double fid_sum = 0.0, fid_sum2 = 0.0, dev_sum = 0.0;
        int ok_frames = 0;

        DetectorSpec det = cfg.detector;
        det.seed = mix64(cfg.detector.seed, static_cast<uint64_t>(si));

        for (int f = 0; f < cfg.frames_per_state; ++f) {
            const uint64_t seed = frame_seed(cfg.master_seed, static_cast<int>(si), f);
            const ComplexField rx = transmit(field0, cfg.channel, seed);
            const Frame frame = capture_frame(rx, det, expected, f);

            std::ostringstream name;
            name << "frame_" << std::setw(4) << std::setfill('0') << f << ".pgm";
            const fs::path frame_path = state_dir / name.str();
            write_pgm16(frame_path.string(), frame);
            manifest.files.emplace_back(frame_path.string(), fnv1a64_file(frame_path.string()));

            // Beam center on the sensor, in meters, for the tip-tilt table.
            double cx = 0.0, cy = 0.0, cw = 0.0;
            for (int iy = 0; iy < frame.pixels; ++iy)
                for (int ix = 0; ix < frame.pixels; ++ix) {
                    const double v = frame.at(ix, iy);
                    cx += v * ix;
                    cy += v * iy;
                    cw += v;
                }
            if (cw > 0.0)
                centers_m.emplace_back((cx / cw - det.pixels / 2) * det.pitch,
                                       (cy / cw - det.pixels / 2) * det.pitch);

            if (is_sup) {
                PetalSet petals = segment_petals(frame, ell);
                if (!petals.accepted()) {
                    ++summary.failed;
                    continue;
                }
                const OrientationResult r = orientation(petals);
                orient_csv << f << "," << format_double(r.angle * 180.0 / kPi) << ","
                           << format_double(r.theta * 180.0 / kPi) << ","
                           << format_double(r.quality) << "\n";
                const double fid = analytic_fidelity(summary.sent_theta, r.theta);
                fid_sum += fid;
                fid_sum2 += fid * fid;
                dev_sum += angle_deviation(summary.sent_theta, r, ell);
                theta_resultant += std::polar(1.0, r.theta);
                ++ok_frames;
            } else {
                std::vector<VortexCore> cores = find_vortices_frame(frame);
                if (cores.empty() || cores.size() > 8) {
                    ++summary.failed;
                    continue;
                }
                for (VortexCore& c : cores) c.frame_index = f;
                if (!per_frame_cores.empty() &&
                    per_frame_cores.back().size() != cores.size())
                    ++summary.failed;  // census change, still tracked
                per_frame_cores.push_back(std::move(cores));
            }
        }

        if (is_sup) {
            if (ok_frames > 0) {
                summary.mean_fidelity = fid_sum / ok_frames;
                summary.fidelity_std =
                    (ok_frames > 1)
                        ? std::sqrt(std::max(0.0, (fid_sum2 - fid_sum * fid_sum / ok_frames) /
                                                      (ok_frames - 1)))
                        : 0.0;
                summary.mean_deviation_deg = dev_sum / ok_frames;
                sent_phases.push_back(summary.sent_theta);
                OrientationResult mean_r;
                mean_r.theta = wrap_2pi(std::arg(theta_resultant));
                mean_r.quality = std::abs(theta_resultant) / ok_frames;
                received_means.push_back(mean_r);
            }
            const fs::path orient_path = state_dir / "orientation.csv";
            write_text_file(orient_path.string(), orient_csv.str());
            manifest.files.emplace_back(orient_path.string(), fnv1a64_file(orient_path.string()));
        } else if (!per_frame_cores.empty()) {
            const TrackSet tracks = track_cores(per_frame_cores);
            for (size_t t = 0; t < tracks.trajectories.size(); ++t)
                for (const auto& [fi, x, y] : tracks.trajectories[t])
                    traj_csv << fi << "," << t << "," << format_double(x) << ","
                             << format_double(y) << "\n";
            const fs::path traj_path = state_dir / "trajectories.csv";
            write_text_file(traj_path.string(), traj_csv.str());
            manifest.files.emplace_back(traj_path.string(), fnv1a64_file(traj_path.string()));
        }

        if (centers_m.size() >= 2) {
            const TipTiltResult tt = tip_tilt(centers_m, cfg.channel.length);
            std::ostringstream tt_csv;
            tt_csv << "frame,theta_x_urad,theta_y_urad\n";
            for (size_t i = 0; i < tt.theta_x.size(); ++i)
                tt_csv << i << "," << format_double(tt.theta_x[i] * 1e6) << ","
                       << format_double(tt.theta_y[i] * 1e6) << "\n";
            tt_csv << "# radial_rms_m = " << format_double(tt.radial_rms) << "\n";
            tt_csv << "# mean_radial_m = " << format_double(tt.mean_radial) << "\n";
            const fs::path tt_path = state_dir / "tiptilt.csv";
            write_text_file(tt_path.string(), tt_csv.str());
            manifest.files.emplace_back(tt_path.string(), fnv1a64_file(tt_path.string()));
        }

        manifest.states.push_back(std::move(summary));
    }

    if (!sent_phases.empty()) {
        const CrosstalkMatrix m = crosstalk(sent_phases, received_means);
        std::ostringstream csv;
        csv << "received_theta_deg";
        for (double s : sent_phases) csv << ",sent_" << format_double(s * 180.0 / kPi);
        csv << "\n";
        for (size_t i = 0; i < m.values.size(); ++i) {
            csv << format_double(m.received_phases[i] * 180.0 / kPi);
            for (double v : m.values[i]) csv << "," << format_double(v);
            csv << "\n";
        }
        const std::string path = (std::filesystem::path(cfg.output_dir) / "crosstalk.csv").string();
        write_text_file(path, csv.str());
        manifest.files.emplace_back(path, fnv1a64_file(path));
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file((std::filesystem::path(cfg.output_dir) / "manifest.txt").string(),
                    manifest.to_text());
    return manifest;
}

namespace {

ReproduceReport reproduce_loss_budget() {
    ReproduceReport r{"loss_budget", "pass", {}};
    const double db = channel_loss_db(0.16, 55.0);
    std::ostringstream line;
    line << "channel loss 10*log10(e)*c*L = " << format_double(db) << " dB (c=0.16 1/m, L=55 m)";
    r.lines.push_back(line.str());
    r.lines.push_back("published system loss: about 40 dB; residual ~" +
                      format_double(40.0 - db) + " dB attributed to optics, not simulated");
    if (std::abs(db - 38.2) > 0.05) r.status = "fail";
    return r;
}

ReproduceReport reproduce_photon_rate() {
    ReproduceReport r{"photon_rate", "pass", {}};
    SourceSpec low{1.898e-19, 532e-9, 1e-9, PureState{}};
    SourceSpec high{1.898e-10, 532e-9, 1e-9, PureState{}};
    const PhotonBudget bl = photon_budget(low);
    const PhotonBudget bh = photon_budget(high);
    r.lines.push_back("1.898e-19 W at 532 nm -> " + format_double(bl.rate) +
                      " photons/s (" + format_double(bl.mean_per_slot) + " per 1 ns slot)");
    r.lines.push_back("1.898e-10 W at 532 nm -> " + format_double(bh.mean_per_slot) +
                      " photons per 1 ns slot");
    r.lines.push_back(
        "published: 'output power as low as 1.898e-19 W ... 0.51 per nanosecond'; the quoted "
        "power yields 0.51 per SECOND -- 0.51/ns requires 1.898e-10 W. Both readings reported, "
        "discrepancy left as-is.");
    if (std::abs(bl.rate - 0.508) > 0.005 || std::abs(bh.mean_per_slot - 0.508) > 0.005)
        r.status = "fail";
    return r;
}

ReproduceReport reproduce_orthogonal_pairs() {
    // Desk-scale stand-in: simulated channel, not the field measurement.
    ReproduceReport r{"orthogonal_pairs", "pass", {}};
    studies::LinkSetup setup;
    const studies::CrosstalkStudy study = studies::crosstalk_study(setup, 10, 2024);
    r.lines.push_back("max projection between dtheta=pi pairs under calibrated noise: " +
                      format_double(study.max_orthogonal) + " (target < 0.04)");
    if (study.max_orthogonal >= 0.04) r.status = "fail";
    r.lines.push_back("stand-in: simulated turbulence; the published field data is not "
                      "reproducible at desk scale");
    return r;
}

ReproduceReport reproduce_crosstalk_diagonal() {
    ReproduceReport r{"crosstalk_diagonal", "pass", {}};
    studies::LinkSetup setup;
    const studies::CrosstalkStudy study = studies::crosstalk_study(setup, 10, 2024);
    r.lines.push_back("min diagonal fidelity under calibrated noise: " +
                      format_double(study.min_diagonal) + " (published: all over 96%)");
    r.lines.push_back("mean next-neighbor entry: " + format_double(study.mean_next_neighbor) +
                      " (closed form cos^2(pi/8) = " + format_double(std::cos(kPi / 8) * std::cos(kPi / 8)) + ")");
    if (study.min_diagonal < 0.96) r.status = "fail";
    r.lines.push_back("stand-in: simulated turbulence calibration");
    return r;
}

ReproduceReport reproduce_angle_deviation() {
    ReproduceReport r{"angle_deviation", "info", {}};
    studies::LinkSetup setup;
    const studies::FluctuationStudy study =
        studies::fidelity_fluctuation_study(setup, 1, 0.0, 100, 77);
    r.lines.push_back("mean orientation deviation, calibrated ell=1 run: " +
                      format_double(study.mean_deviation_deg) +
                      " deg (published band 2.4-11.0 deg, average 7.2 deg)");
    r.lines.push_back("informational: the field turbulence strength is uncharacterized");
    return r;
}

ReproduceReport reproduce_fluctuation(int ell, int frames, double lo, double hi,
                                      const std::string& name) {
    ReproduceReport r{name, "pass", {}};
    studies::LinkSetup setup;
    const studies::FluctuationStudy study =
        studies::fidelity_fluctuation_study(setup, ell, kPi / 4.0, frames, 99 + ell);
    std::ostringstream line;
    line << frames << "-frame ell=" << ell << " run: fidelity std "
         << format_double(study.fidelity_std * 100.0) << "% (target " << lo * 100.0 << "-"
         << hi * 100.0 << "%), mean " << format_double(study.mean_fidelity);
    r.lines.push_back(line.str());
    if (study.fidelity_std < lo || study.fidelity_std > hi) r.status = "fail";
    r.lines.push_back("stand-in: simulated turbulence calibration");
    return r;
}

ReproduceReport reproduce_vortex_conservation() {
    ReproduceReport r{"vortex_conservation", "pass", {}};
    studies::LinkSetup setup;
    setup.grid = GridSpec{256, setup.grid.extent};  // resolve few-pixel core splittings
    const studies::VortexStudy study = studies::vortex_conservation_study(setup, 3, 100, 4242);
    r.lines.push_back("realizations with exactly 3 unit cores: " +
                      std::to_string(study.split_into_unit_cores) + "/100 (target >= 95)");
    r.lines.push_back("realizations with total winding +3: " +
                      std::to_string(study.winding_conserved) + "/100 (target 100)");
    r.lines.push_back("inter-core distance std " + format_double(study.inter_core_std) +
                      " px vs centroid wander std " + format_double(study.wander_std) + " px");
    if (study.split_into_unit_cores < 95 || study.winding_conserved < 100 ||
        !(study.inter_core_std < study.wander_std))
        r.status = "fail";
    r.lines.push_back("stand-in: simulated weak-turbulence ensemble");
    return r;
}

ReproduceReport reproduce_tip_tilt() {
    ReproduceReport r{"tip_tilt", "pass", {}};
    const double theta = std::atan(0.64e-3 / 55.0);
    r.lines.push_back("0.64 mm wander over 55 m -> arctan(dx/L) = " +
                      format_double(theta * 1e6) + " urad");
    const studies::TipTiltStudy study = studies::tip_tilt_study(0.64e-3, 55.0, 2000, 31337);
    r.lines.push_back("estimator recovery of 0.64 mm mean radial wander: " +
                      format_double(study.mean_radial * 1e3) + " mm (target within 5%)");
    if (std::abs(theta * 1e6 - 11.64) > 0.01) r.status = "fail";
    if (std::abs(study.mean_radial - 0.64e-3) > 0.05 * 0.64e-3) r.status = "fail";
    return r;
}

}  // namespace

std::vector<std::string> reproduce_registry() {
    return {"loss_budget",        "photon_rate",           "orthogonal_pairs",
            "crosstalk_diagonal", "angle_deviation",       "fidelity_fluctuation_l1",
            "fidelity_fluctuation_l3", "vortex_conservation", "tip_tilt"};
}

ReproduceReport reproduce(const std::string& statistic_name) {
    if (statistic_name == "loss_budget") return reproduce_loss_budget();
    if (statistic_name == "photon_rate") return reproduce_photon_rate();
    if (statistic_name == "orthogonal_pairs") return reproduce_orthogonal_pairs();
    if (statistic_name == "crosstalk_diagonal") return reproduce_crosstalk_diagonal();
    if (statistic_name == "angle_deviation") return reproduce_angle_deviation();
    if (statistic_name == "fidelity_fluctuation_l1")
        return reproduce_fluctuation(1, 300, 0.005, 0.028, "fidelity_fluctuation_l1");
    if (statistic_name == "fidelity_fluctuation_l3")
        return reproduce_fluctuation(3, 900, 0.0, 0.011, "fidelity_fluctuation_l3");
    if (statistic_name == "vortex_conservation") return reproduce_vortex_conservation();
    if (statistic_name == "tip_tilt") return reproduce_tip_tilt();

    std::ostringstream msg;
    msg << "unknown statistic '" << statistic_name << "'; registry:";
    for (const auto& name : reproduce_registry()) msg << " " << name;
    throw std::invalid_argument(msg.str());
}

}  // namespace uwoam
