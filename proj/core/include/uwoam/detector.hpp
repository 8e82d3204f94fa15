#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uwoam/grid.hpp"

namespace uwoam {

/// Photon-counting camera model: pixel integration, quantum efficiency,
/// Poisson shot noise and a uniform background.
struct DetectorSpec {
    int pixels = 512;       ///< sensor side length [px]
    double pitch = 2e-4;    ///< [m/px]
    double exposure = 0.03; ///< [s]
    double qe = 0.2;
    double background = 0.0; ///< mean background counts/pixel/frame
    uint64_t seed = 0;

    void validate() const;
};

struct Frame {
    std::vector<uint32_t> counts;  ///< row-major, pixels x pixels
    int pixels = 0;
    double exposure = 0.0;
    int index = 0;
    double timestamp = 0.0;

    uint32_t at(int ix, int iy) const { return counts[static_cast<size_t>(iy) * pixels + ix]; }
    uint64_t total() const;
};

/// Renders one frame. Per-pixel mean is qe * expected_photons * (pixel
/// share of the field power) + background; counts are Poisson draws
/// deterministic in (det.seed, frame_index). The field is bilinearly
/// resampled onto the sensor grid.
Frame capture_frame(const ComplexField& field, const DetectorSpec& det,
                    double expected_photons, int frame_index);

/// Renders n_frames frames, one channel realization per frame via the
/// supplied generator. Timestamps are index * exposure.
std::vector<Frame> capture_sequence(const std::function<ComplexField(int)>& field_source,
                                    const DetectorSpec& det, double expected_photons,
                                    int n_frames);

/// 16-bit binary PGM ("P5", maxval 65535, big-endian). Counts above
/// 65535 saturate.
void write_pgm16(const std::string& path, const Frame& frame);
Frame read_pgm16(const std::string& path);

}  // namespace uwoam
