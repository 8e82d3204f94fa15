#include "uwoam/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "uwoam/fft.hpp"
#include "uwoam/rng.hpp"

namespace uwoam {

namespace {
constexpr double kPi = std::numbers::pi;
}

void TurbulenceSpec::validate() const {
    if (!(cn2 >= 0.0)) throw std::invalid_argument("TurbulenceSpec: cn2 must be >= 0");
    if (!(inner_scale > 0.0 && inner_scale < outer_scale))
        throw std::invalid_argument("TurbulenceSpec: need 0 < inner_scale < outer_scale");
    if (screen_count < 0) throw std::invalid_argument("TurbulenceSpec: screen_count must be >= 0");
}

void ChannelSpec::validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("ChannelSpec: length must be positive");
    if (!(extinction >= 0.0)) throw std::invalid_argument("ChannelSpec: extinction must be >= 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("ChannelSpec: wavelength must be positive");
    if (!(tilt_rms >= 0.0)) throw std::invalid_argument("ChannelSpec: tilt_rms must be >= 0");
    turbulence.validate();
}

double von_karman_phi_n(double kappa, const TurbulenceSpec& turb) {
    const double kappa_m = 5.92 / turb.inner_scale;  // inner-scale cutoff
    const double kappa_0 = 1.0 / turb.outer_scale;
    const double k2 = kappa * kappa;
    return 0.033 * turb.cn2 * std::exp(-k2 / (kappa_m * kappa_m)) *
           std::pow(k2 + kappa_0 * kappa_0, -11.0 / 6.0);
}

PhaseScreen make_screen(const TurbulenceSpec& turb, const GridSpec& grid, double dz,
                        double wavelength, uint64_t draw_index,
                        std::vector<std::string>* diagnostics) {
    turb.validate();
    grid.validate();
    if (!(dz > 0.0)) throw std::invalid_argument("make_screen: dz must be positive");

    PhaseScreen screen;
    screen.grid = grid;
    screen.phase.assign(static_cast<size_t>(grid.n) * grid.n, 0.0);
    if (turb.cn2 == 0.0) return screen;

    if (diagnostics && grid.pitch() > turb.inner_scale) {
        std::ostringstream msg;
        msg << "make_screen: pitch " << grid.pitch() << " m does not resolve inner scale "
            << turb.inner_scale << " m";
        diagnostics->push_back(msg.str());
    }

    const int n = grid.n;
    const double k = 2.0 * kPi / wavelength;
    const double dkappa = 2.0 * kPi / grid.extent;

    // Spectral synthesis: complex white noise filtered by the phase
    // spectrum Phi_phi = 2 pi k^2 dz Phi_n, real part kept. The backward
    // transform is unnormalized, so no n^2 compensation is needed for
    // Var(screen) = sum Phi_phi dkappa^2.
    Rng rng(turb.seed, draw_index);
    std::vector<cplx> spec(static_cast<size_t>(n) * n, 0.0);
    for (int iy = 0; iy < n; ++iy) {
        const double ky = fft::freq(iy, n, grid.pitch()) * 2.0 * kPi;
        for (int ix = 0; ix < n; ++ix) {
            const double kx = fft::freq(ix, n, grid.pitch()) * 2.0 * kPi;
            const double g1 = rng.gaussian();
            const double g2 = rng.gaussian();
            if (ix == 0 && iy == 0) continue;  // no piston term
            const double kappa = std::hypot(kx, ky);
            const double phi_phase = 2.0 * kPi * k * k * dz * von_karman_phi_n(kappa, turb);
            const double amp = std::sqrt(phi_phase) * dkappa;
            spec[static_cast<size_t>(iy) * n + ix] = cplx(g1 * amp, g2 * amp);
        }
    }
    fft::backward_raw(spec, n);

    double mean = 0.0;
    for (size_t i = 0; i < spec.size(); ++i) {
        screen.phase[i] = spec[i].real();
        mean += screen.phase[i];
    }
    mean /= static_cast<double>(screen.phase.size());
    for (double& p : screen.phase) p -= mean;
    return screen;
}

ComplexField propagate_step(const ComplexField& field, double dz, double wavelength,
                            std::vector<std::string>* diagnostics) {
    if (!(dz >= 0.0)) throw std::invalid_argument("propagate_step: dz must be >= 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("propagate_step: wavelength must be positive");
    if (dz == 0.0) return field;

    if (diagnostics) {
        const double r = field.beam_radius();
        if (r > field.grid.extent / 3.0) {
            std::ostringstream msg;
            msg << "propagate_step: beam radius " << r << " m exceeds extent/3 ("
                << field.grid.extent / 3.0 << " m); aliasing likely";
            diagnostics->push_back(msg.str());
        }
    }

    const int n = field.grid.n;
    const double pitch = field.grid.pitch();
    ComplexField out = field;
    fft::forward(out.amp, n);
    for (int iy = 0; iy < n; ++iy) {
        const double fy = fft::freq(iy, n, pitch);
        for (int ix = 0; ix < n; ++ix) {
            const double fx = fft::freq(ix, n, pitch);
            // Paraxial unit-modulus transfer function (global exp(ikz) dropped).
            const double phase = -kPi * wavelength * dz * (fx * fx + fy * fy);
            out.at(ix, iy) *= std::polar(1.0, phase);
        }
    }
    fft::inverse(out.amp, n);
    return out;
}

TiltDraw draw_tilt(const ChannelSpec& ch, uint64_t realization_seed) {
    TiltDraw t;
    if (ch.tilt_rms <= 0.0) return t;
    Rng rng(mix64(realization_seed, 0x7114ULL));
    t.theta_x = rng.gaussian(0.0, ch.tilt_rms);
    t.theta_y = rng.gaussian(0.0, ch.tilt_rms);
    return t;
}

ComplexField transmit(const ComplexField& field, const ChannelSpec& ch, uint64_t realization_seed,
                      std::vector<std::string>* diagnostics) {
    ch.validate();
    const double L = ch.length;
    const double lam = ch.wavelength;
    const int screens = (ch.turbulence.cn2 > 0.0) ? ch.turbulence.screen_count : 0;

    ComplexField f = field;
    if (screens == 0) {
        f = propagate_step(f, L, lam, diagnostics);
    } else {
        const double dz = L / screens;
        TurbulenceSpec turb = ch.turbulence;
        turb.seed = mix64(turb.seed, realization_seed);
        for (int s = 0; s < screens; ++s) {
            f = propagate_step(f, 0.5 * dz, lam, diagnostics);
            PhaseScreen screen = make_screen(turb, f.grid, dz, lam, static_cast<uint64_t>(s),
                                             diagnostics);
            for (size_t i = 0; i < f.amp.size(); ++i)
                f.amp[i] *= std::polar(1.0, screen.phase[i]);
            f = propagate_step(f, 0.5 * dz, lam, diagnostics);
        }
    }

    const double att = std::exp(-0.5 * ch.extinction * L);
    for (cplx& a : f.amp) a *= att;

    if (ch.tilt_rms > 0.0) {
        const TiltDraw t = draw_tilt(ch, realization_seed);
        const double k = 2.0 * kPi / lam;
        const int n = f.grid.n;
        for (int iy = 0; iy < n; ++iy) {
            const double y = f.grid.coord(iy);
            for (int ix = 0; ix < n; ++ix) {
                const double x = f.grid.coord(ix);
                f.at(ix, iy) *= std::polar(1.0, k * (t.theta_x * x + t.theta_y * y));
            }
        }
    }
    return f;
}

double channel_loss_db(double extinction, double length) {
    if (!(extinction >= 0.0)) throw std::invalid_argument("channel_loss_db: extinction must be >= 0");
    if (!(length > 0.0)) throw std::invalid_argument("channel_loss_db: length must be positive");
    return 10.0 * std::log10(std::numbers::e) * extinction * length;
}

}  // namespace uwoam
