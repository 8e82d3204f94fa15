#include "uwoam/studies.hpp"

#include <cmath>
#include <numbers>

#include "uwoam/rng.hpp"

namespace uwoam::studies {

namespace {
constexpr double kPi = std::numbers::pi;
}

LinkSetup::LinkSetup() {
    channel.length = 55.0;
    channel.extinction = 0.16;
    channel.wavelength = wavelength;
    channel.turbulence.cn2 = kCalibratedCn2;
    channel.turbulence.outer_scale = 1.0;
    channel.turbulence.inner_scale = 1e-3;
    channel.turbulence.screen_count = 10;
    // Pointing jitter calibrated for 0.64 mm mean radial wander at 55 m:
    // sigma = 0.64 mm / sqrt(pi/2), tilt_rms = sigma / L.
    channel.tilt_rms = 0.64e-3 / std::sqrt(kPi / 2.0) / 55.0;
}

Frame render_noiseless_frame(const ComplexField& field, const DetectorSpec& det,
                             double total_counts) {
    det.validate();
    const int np = det.pixels;
    Frame frame;
    frame.pixels = np;
    frame.exposure = det.exposure;
    frame.counts.assign(static_cast<size_t>(np) * np, 0);

    std::vector<double> intensity(frame.counts.size(), 0.0);
    double sum = 0.0;
    const int n = field.grid.n;
    const double pitch = field.grid.pitch();
    for (int iy = 0; iy < np; ++iy) {
        const double y = (iy - np / 2) * det.pitch;
        for (int ix = 0; ix < np; ++ix) {
            const double x = (ix - np / 2) * det.pitch;
            const double gx = x / pitch + n / 2;
            const double gy = y / pitch + n / 2;
            const int jx = static_cast<int>(std::floor(gx));
            const int jy = static_cast<int>(std::floor(gy));
            if (jx < 0 || jy < 0 || jx + 1 >= n || jy + 1 >= n) continue;
            const double fx = gx - jx, fy = gy - jy;
            const double v = (1 - fx) * (1 - fy) * std::norm(field.at(jx, jy)) +
                             fx * (1 - fy) * std::norm(field.at(jx + 1, jy)) +
                             (1 - fx) * fy * std::norm(field.at(jx, jy + 1)) +
                             fx * fy * std::norm(field.at(jx + 1, jy + 1));
            intensity[static_cast<size_t>(iy) * np + ix] = v;
            sum += v;
        }
    }
    if (sum > 0.0)
        for (size_t i = 0; i < intensity.size(); ++i)
            frame.counts[i] = static_cast<uint32_t>(std::lround(intensity[i] / sum * total_counts));
    return frame;
}

FluctuationStudy fidelity_fluctuation_study(const LinkSetup& setup, int ell, double theta,
                                            int n_frames, uint64_t seed) {
    SuperpositionSpec sent{ell, theta, 0.5};
    const ComplexField field0 = superpose(sent, setup.grid, setup.waist, setup.wavelength);

    DetectorSpec det = setup.detector;
    det.seed = mix64(seed, 0xcafeULL);

    std::vector<Frame> frames = capture_sequence(
        [&](int i) { return transmit(field0, setup.channel, mix64(seed, i)); }, det,
        setup.expected_photons, n_frames);

    const FidelitySeries series = fidelity_series(frames, sent);
    FluctuationStudy study;
    study.mean_fidelity = series.mean;
    study.fidelity_std = series.stddev;
    study.frames = n_frames;
    study.failed = series.failed;

    double dev_sum = 0.0;
    int dev_count = 0;
    for (const Frame& f : frames) {
        PetalSet petals = segment_petals(f, std::abs(ell));
        if (!petals.accepted()) continue;
        const OrientationResult r = orientation(petals);
        if (r.low_confidence) continue;
        dev_sum += angle_deviation(theta, r, std::abs(ell));
        ++dev_count;
    }
    if (dev_count > 0) study.mean_deviation_deg = dev_sum / dev_count;
    return study;
}

CrosstalkStudy crosstalk_study(const LinkSetup& setup, int frames_per_state, uint64_t seed) {
    std::vector<double> sent_phases;
    for (int k = 0; k < 8; ++k) sent_phases.push_back(k * kPi / 4.0);

    std::vector<OrientationResult> received;
    for (size_t si = 0; si < sent_phases.size(); ++si) {
        SuperpositionSpec sent{1, sent_phases[si], 0.5};
        const ComplexField field0 = superpose(sent, setup.grid, setup.waist, setup.wavelength);
        DetectorSpec det = setup.detector;
        det.seed = mix64(seed, si, 0xcafeULL);

        cplx resultant = 0.0;
        for (int f = 0; f < frames_per_state; ++f) {
            const ComplexField rx = transmit(field0, setup.channel, mix64(seed, si, f));
            const Frame frame = capture_frame(rx, det, setup.expected_photons, f);
            PetalSet petals = segment_petals(frame, 1);
            if (!petals.accepted()) continue;
            resultant += std::polar(1.0, orientation(petals).theta);
        }
        OrientationResult r;
        r.theta = wrap_2pi(std::arg(resultant));
        r.angle = SuperpositionSpec{1, r.theta, 0.5}.petal_orientation();
        r.quality = std::abs(resultant) / frames_per_state;
        received.push_back(r);
    }

    CrosstalkStudy study;
    study.matrix = crosstalk(sent_phases, received);
    study.min_diagonal = 1.0;
    double nn_sum = 0.0;
    int nn_count = 0;
    for (size_t i = 0; i < sent_phases.size(); ++i) {
        for (size_t j = 0; j < sent_phases.size(); ++j) {
            const double v = study.matrix.values[i][j];
            double dt = std::abs(sent_phases[i] - sent_phases[j]);
            dt = std::min(dt, 2.0 * kPi - dt);
            if (i == j) study.min_diagonal = std::min(study.min_diagonal, v);
            if (std::abs(dt - kPi) < 1e-9) study.max_orthogonal = std::max(study.max_orthogonal, v);
            if (std::abs(dt - kPi / 4.0) < 1e-9) {
                nn_sum += v;
                ++nn_count;
            }
        }
    }
    if (nn_count > 0) study.mean_next_neighbor = nn_sum / nn_count;
    return study;
}

VortexStudy vortex_conservation_study(const LinkSetup& setup, int ell, int realizations,
                                      uint64_t seed, double pair_resolution) {
    LGModeSpec mode{ell, 0, setup.waist, setup.wavelength};
    const ComplexField field0 = lg_field(mode, setup.grid);

    VortexStudy study;
    study.realizations = realizations;
    const double pitch = setup.grid.pitch();
    const double pair_px = pair_resolution / pitch;

    std::vector<std::vector<VortexCore>> per_frame;
    std::vector<std::pair<double, double>> centroids;
    for (int r = 0; r < realizations; ++r) {
        const ComplexField rx = transmit(field0, setup.channel, mix64(seed, r));
        const double aperture = rx.beam_radius();
        std::vector<VortexCore> cores = find_vortices_field(rx, aperture);

        // Annihilate sub-resolution dipole pairs, closest pair first.
        for (;;) {
            double best = pair_px;
            int bi = -1, bj = -1;
            for (size_t i = 0; i < cores.size(); ++i)
                for (size_t j = i + 1; j < cores.size(); ++j) {
                    if (cores[i].charge + cores[j].charge != 0) continue;
                    if (std::abs(cores[i].charge) != 1) continue;
                    const double d = std::hypot(cores[i].x - cores[j].x, cores[i].y - cores[j].y);
                    if (d < best) {
                        best = d;
                        bi = static_cast<int>(i);
                        bj = static_cast<int>(j);
                    }
                }
            if (bi < 0) break;
            cores.erase(cores.begin() + bj);
            cores.erase(cores.begin() + bi);
        }

        // Pointing jitter moves the whole received pattern; a receiver
        // camera books it as a common displacement of every core.
        const TiltDraw tilt = draw_tilt(setup.channel, mix64(seed, r));
        const double dx = setup.channel.length * std::tan(tilt.theta_x) / pitch;
        const double dy = setup.channel.length * std::tan(tilt.theta_y) / pitch;
        for (VortexCore& c : cores) {
            c.x += dx;
            c.y += dy;
        }

        int total = 0;
        bool all_unit = !cores.empty();
        for (const VortexCore& c : cores) {
            total += c.charge;
            if (std::abs(c.charge) != 1) all_unit = false;
        }
        if (total == ell) ++study.winding_conserved;
        if (all_unit && static_cast<int>(cores.size()) == std::abs(ell))
            ++study.split_into_unit_cores;

        if (static_cast<int>(cores.size()) == std::abs(ell)) {
            for (VortexCore& c : cores) c.frame_index = r;
            per_frame.push_back(cores);
            double cx = 0.0, cy = 0.0;
            for (const VortexCore& c : cores) {
                cx += c.x;
                cy += c.y;
            }
            centroids.emplace_back(cx / cores.size(), cy / cores.size());
        }
    }

    if (per_frame.size() >= 2) {
        const TrackSet tracks = track_cores(per_frame);
        double sum = 0.0, sum2 = 0.0;
        size_t count = 0;
        for (const auto& dists : tracks.inter_core_distances)
            for (double d : dists) {
                sum += d;
                sum2 += d * d;
                ++count;
            }
        if (count > 1)
            study.inter_core_std =
                std::sqrt(std::max(0.0, (sum2 - sum * sum / count) / (count - 1)));

        double mx = 0.0, my = 0.0;
        for (const auto& [cx, cy] : centroids) {
            mx += cx;
            my += cy;
        }
        mx /= centroids.size();
        my /= centroids.size();
        double w2 = 0.0;
        for (const auto& [cx, cy] : centroids)
            w2 += (cx - mx) * (cx - mx) + (cy - my) * (cy - my);
        study.wander_std = std::sqrt(w2 / centroids.size());
    }
    (void)pitch;
    return study;
}

TipTiltStudy tip_tilt_study(double target_mean_radial, double length, int samples, uint64_t seed) {
    TipTiltStudy study;
    study.mean_radial_target = target_mean_radial;
    // For per-axis Gaussian wander of std sigma, E[r] = sigma sqrt(pi/2).
    const double sigma = target_mean_radial / std::sqrt(kPi / 2.0);
    study.tilt_rms_in = sigma / length;

    ChannelSpec ch;
    ch.length = length;
    ch.tilt_rms = study.tilt_rms_in;

    std::vector<std::pair<double, double>> positions;
    positions.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const TiltDraw t = draw_tilt(ch, mix64(seed, i));
        positions.emplace_back(length * std::tan(t.theta_x), length * std::tan(t.theta_y));
    }
    const TipTiltResult r = tip_tilt(positions, length);
    study.mean_radial = r.mean_radial;
    double t2 = 0.0;
    for (size_t i = 0; i < r.theta_x.size(); ++i)
        t2 += r.theta_x[i] * r.theta_x[i] + r.theta_y[i] * r.theta_y[i];
    study.theta_rms_recovered = std::sqrt(t2 / (2.0 * r.theta_x.size()));
    return study;
}

}  // namespace uwoam::studies
