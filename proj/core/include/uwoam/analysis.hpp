#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "uwoam/detector.hpp"
#include "uwoam/grid.hpp"
#include "uwoam/modes.hpp"

namespace uwoam {

/// Petal centroids of a 2*ell lobed superposition pattern, pixel
/// coordinates. found_count < 2*ell marks a failed detection.
struct PetalSet {
    std::vector<std::pair<double, double>> centroids;
    std::pair<double, double> pattern_center{0.0, 0.0};
    int ell = 1;
    int found_count = 0;

    bool accepted() const { return found_count >= 2 * ell; }
};

struct OrientationResult {
    double angle = 0.0;   ///< pattern orientation [rad], in [0, pi/ell)
    double theta = 0.0;   ///< retrieved relative phase [rad], in [0, 2pi)
    double quality = 0.0; ///< resultant length of the circular mean, [0,1]
    bool low_confidence = false;  ///< quality < 0.5
};

struct CrosstalkMatrix {
    std::vector<double> sent_phases;
    std::vector<double> received_phases;
    std::vector<std::vector<double>> values;  ///< values[i][j] = |<sent_j|recv_i>|^2
};

struct FidelitySeries {
    std::vector<std::optional<double>> values;  ///< nullopt = failed detection
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    int failed = 0;
};

/// Phase singularity: sub-pixel position (grid or pixel coordinates
/// depending on the detector used) plus topological charge.
struct VortexCore {
    double x = 0.0;
    double y = 0.0;
    int charge = 0;
    int frame_index = 0;
};

struct TrackSet {
    /// trajectories[core][k] = (frame_index, x, y)
    std::vector<std::vector<std::tuple<int, double, double>>> trajectories;
    /// inter_core_distances[frame] = pairwise distances, pixels, ordered
    /// (0,1), (0,2), ..., (1,2), ...
    std::vector<std::vector<double>> inter_core_distances;
    bool discontinuity = false;  ///< core count changed between frames
};

struct TipTiltResult {
    std::vector<double> theta_x;  ///< per-sample tip [rad], about the mean
    std::vector<double> theta_y;
    double radial_rms = 0.0;      ///< RMS radial deviation [m]
    double mean_radial = 0.0;     ///< mean radial deviation [m]
};

/// Petal segmentation: 3x3 box smoothing (2 passes), threshold at
/// threshold_fraction * max, 8-connected labeling, keep the 2*ell largest
/// components, intensity-weighted centroids. Never throws on a bad
/// frame; the failure is carried in found_count.
PetalSet segment_petals(const Frame& frame, int ell, double threshold_fraction = 0.5);

/// Circular-mean orientation estimator over the centroid polar angles:
/// angle = arg(sum e^{i 2 ell beta}) / (2 ell) folded into [0, pi/ell);
/// theta = (-2 ell angle) mod 2pi.
OrientationResult orientation(const PetalSet& petals);

/// |expected - measured| orientation difference in degrees, folded into
/// [0, 90/ell]. Expected orientation is (-sent_theta/(2 ell)) mod pi/ell.
double angle_deviation(double sent_theta, const OrientationResult& result, int ell);

CrosstalkMatrix crosstalk(const std::vector<double>& sent_phases,
                          const std::vector<OrientationResult>& received);

/// Per-frame segment -> orient -> analytic fidelity against the sent
/// phase. Failed detections become gaps, excluded from the statistics.
FidelitySeries fidelity_series(const std::vector<Frame>& frames, const SuperpositionSpec& sent);

/// Phase-winding vortex detector: 2x2 plaquettes with +-2pi circulation
/// inside the aperture, adjacent plaquettes merged, sub-pixel position
/// from the local zero crossing of the field. Positions are grid sample
/// coordinates. aperture_radius in meters about the grid center.
std::vector<VortexCore> find_vortices_field(const ComplexField& field, double aperture_radius);

/// Intensity-only vortex detector for camera frames. Dark pixels inside
/// the filled beam support (pixels brighter than beam_support_fraction *
/// max define the support ring) are flooded in ascending intensity; a
/// basin survives only if its depth at the merge saddle exceeds
/// prominence_sigmas * sqrt(saddle counts), the Poisson noise scale.
/// Survivors are reported as cores, sub-pixel refined by a paraboloid
/// fit. Charge is reported as magnitude 1.
std::vector<VortexCore> find_vortices_frame(const Frame& frame, double beam_support_fraction = 0.5,
                                            double prominence_sigmas = 3.0);

/// Frame-to-frame optimal assignment (exhaustive over <= 8 cores)
/// minimizing total squared displacement.
TrackSet track_cores(const std::vector<std::vector<VortexCore>>& per_frame_cores);

/// Tip/tilt statistics of a centroid time series: per-sample
/// theta = arctan(delta / L) about the series mean, plus radial stats.
TipTiltResult tip_tilt(const std::vector<std::pair<double, double>>& positions, double length);

}  // namespace uwoam
