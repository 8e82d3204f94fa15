#pragma once

#include <cstdint>

#include "uwoam/analysis.hpp"
#include "uwoam/channel.hpp"
#include "uwoam/detector.hpp"
#include "uwoam/source.hpp"

namespace uwoam::studies {

/// Shared desk-scale link used by the canned statistic reproductions:
/// 532 nm, 55 m, 10 screens, calibrated cn2, 0.1 m grid, 1 cm waist.
struct LinkSetup {
    GridSpec grid{128, 0.1};
    double waist = 0.01;
    double wavelength = 532e-9;
    ChannelSpec channel;
    DetectorSpec detector{128, 0.1 / 128, 0.03, 0.2, 0.01, 0};
    double expected_photons = 2e5;

    LinkSetup();
};

/// Deterministic frame rendering (counts = round(mean)), for synthetic
/// ground-truth images with no shot noise.
Frame render_noiseless_frame(const ComplexField& field, const DetectorSpec& det,
                             double total_counts);

struct FluctuationStudy {
    double mean_fidelity = 0.0;
    double fidelity_std = 0.0;
    double mean_deviation_deg = 0.0;
    int frames = 0;
    int failed = 0;
};

/// Sends one superposition state through n_frames independent channel
/// realizations and runs the image pipeline on each.
FluctuationStudy fidelity_fluctuation_study(const LinkSetup& setup, int ell, double theta,
                                            int n_frames, uint64_t seed);

struct CrosstalkStudy {
    CrosstalkMatrix matrix;
    double min_diagonal = 0.0;
    double max_orthogonal = 0.0;       ///< largest entry at |dtheta| = pi
    double mean_next_neighbor = 0.0;   ///< mean entry at |dtheta| = pi/4
};

/// 8 equally spaced first-order sent states; per-state received phase is
/// the circular mean of the per-frame retrieved phases.
CrosstalkStudy crosstalk_study(const LinkSetup& setup, int frames_per_state, uint64_t seed);

struct VortexStudy {
    int realizations = 0;
    int split_into_unit_cores = 0;  ///< realizations with exactly |ell| charge-sign cores
    int winding_conserved = 0;      ///< realizations with total charge == ell
    double inter_core_std = 0.0;    ///< pixels, across realizations
    double wander_std = 0.0;        ///< centroid wander std, pixels
};

/// Transmits an ell=3 pure state through independent weak-turbulence
/// realizations and books the vortex census on the received fields.
/// Opposite-charge core pairs closer than pair_resolution (meters) are
/// transient dipoles no camera resolves and annihilate before counting.
/// Pointing jitter (channel tilt_rms) displaces each realization's
/// pattern geometrically, feeding the centroid-wander statistic.
VortexStudy vortex_conservation_study(const LinkSetup& setup, int ell, int realizations,
                                      uint64_t seed, double pair_resolution = 2e-3);

struct TipTiltStudy {
    double tilt_rms_in = 0.0;       ///< [rad]
    double mean_radial = 0.0;       ///< recovered [m]
    double mean_radial_target = 0.0;
    double theta_rms_recovered = 0.0;  ///< [rad]
};

/// Draws pointing jitter calibrated for a target mean radial wander,
/// converts to receiver-plane positions and runs the tip/tilt estimator.
TipTiltStudy tip_tilt_study(double target_mean_radial, double length, int samples, uint64_t seed);

}  // namespace uwoam::studies
