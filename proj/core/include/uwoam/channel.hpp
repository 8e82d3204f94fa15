#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uwoam/grid.hpp"

namespace uwoam {

/// Von Karman turbulence parameters. cn2 = 0 disables the screens.
struct TurbulenceSpec {
    double cn2 = 0.0;          ///< refractive-index structure constant [m^-2/3]
    double outer_scale = 1.0;  ///< L0 [m]
    double inner_scale = 1e-3; ///< l0 [m]
    int screen_count = 10;
    uint64_t seed = 0;

    void validate() const;
};

/// Default cn2 calibrated so that the per-frame fidelity spread of
/// first-order superpositions lands inside the observed 0.5%-2.8% band
/// for the default 55 m / 10-screen channel.
inline constexpr double kCalibratedCn2 = 2.0e-13;

struct ChannelSpec {
    double length = 55.0;      ///< [m]
    double extinction = 0.16;  ///< Beer-law attenuation coefficient c [m^-1]
    double wavelength = 532e-9;
    TurbulenceSpec turbulence;
    double tilt_rms = 0.0;     ///< per-axis RMS pointing jitter [rad]

    void validate() const;
};

/// Random phase accumulated over one turbulence slab.
struct PhaseScreen {
    GridSpec grid;
    std::vector<double> phase;  ///< radians, zero spatial mean
};

/// One pointing-jitter draw, per-axis angles in radians.
struct TiltDraw {
    double theta_x = 0.0;
    double theta_y = 0.0;
};

/// Spectral synthesis of one phase screen for a slab of thickness dz.
/// Deterministic in (turb.seed, draw_index). Appends a warning to
/// diagnostics when the grid pitch cannot resolve the inner scale.
PhaseScreen make_screen(const TurbulenceSpec& turb, const GridSpec& grid, double dz,
                        double wavelength, uint64_t draw_index,
                        std::vector<std::string>* diagnostics = nullptr);

/// Paraxial angular-spectrum step over distance dz. Unit-modulus transfer
/// function, so the norm is conserved. Appends an aliasing warning when
/// the beam radius exceeds extent/3.
ComplexField propagate_step(const ComplexField& field, double dz, double wavelength,
                            std::vector<std::string>* diagnostics = nullptr);

/// Pointing jitter for one channel realization; also used by transmit().
TiltDraw draw_tilt(const ChannelSpec& ch, uint64_t realization_seed);

/// Full channel pass: split-step diffraction through screen_count slabs
/// (half-slab, screen, half-slab), Beer-law amplitude attenuation
/// exp(-cL/2), then one tilt phase ramp. Deterministic per seed.
ComplexField transmit(const ComplexField& field, const ChannelSpec& ch,
                      uint64_t realization_seed,
                      std::vector<std::string>* diagnostics = nullptr);

/// Beer-law channel loss in dB: 10 log10(e) * c * L.
double channel_loss_db(double extinction, double length);

/// Independent-oracle support: the von Karman refractive-index spectrum
/// Phi_n(kappa) used by make_screen, exposed for spectral checks.
double von_karman_phi_n(double kappa, const TurbulenceSpec& turb);

}  // namespace uwoam
