#include "uwoam/modes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace uwoam {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_2pi(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    return t;
}

void LGModeSpec::validate() const {
    if (!(waist > 0.0)) throw std::invalid_argument("LGModeSpec: waist must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("LGModeSpec: wavelength must be positive");
    if (p < 0) throw std::invalid_argument("LGModeSpec: radial index p must be >= 0");
}

void SuperpositionSpec::validate() const {
    if (std::abs(ell) < 1) throw std::invalid_argument("SuperpositionSpec: |ell| must be >= 1");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("SuperpositionSpec: weight must be in [0,1]");
    if (!std::isfinite(theta)) throw std::invalid_argument("SuperpositionSpec: theta must be finite");
}

double SuperpositionSpec::petal_orientation() const {
    const int l = std::abs(ell);
    const double period = kPi / l;
    double phi = std::fmod(-theta / (2.0 * l), period);
    if (phi < 0.0) phi += period;
    return phi;
}

double ComplexField::beam_radius() const {
    double sum = 0.0, r2sum = 0.0;
    const int n = grid.n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const double I = std::norm(at(ix, iy));
            sum += I;
            r2sum += I * (x * x + y * y);
        }
    }
    if (!(sum > 0.0)) return 0.0;
    return 2.0 * std::sqrt(r2sum / sum / 2.0);  // 1/e^2 radius of a Gaussian
}

ComplexField lg_field(const LGModeSpec& mode, const GridSpec& grid, double z) {
    mode.validate();
    grid.validate();

    const double w0 = mode.waist;
    const double lam = mode.wavelength;
    const double zR = kPi * w0 * w0 / lam;
    const double wz = w0 * std::sqrt(1.0 + (z / zR) * (z / zR));
    const double inv_R = (z == 0.0) ? 0.0 : z / (z * z + zR * zR);
    const int l = std::abs(mode.ell);
    const double gouy = (2 * mode.p + l + 1) * std::atan2(z, zR);
    const double k = 2.0 * kPi / lam;

    const double pitch = grid.pitch();
    if (w0 < 8.0 * pitch) {
        std::ostringstream msg;
        msg << "lg_field: grid under-resolves the mode: waist " << w0 << " m < 8 * pitch ("
            << 8.0 * pitch << " m); increase n or shrink extent";
        throw SamplingError(msg.str());
    }
    const double r_beam = wz * std::sqrt(0.5 * l + mode.p + 1.0);
    if (grid.extent < 6.0 * r_beam) {
        std::ostringstream msg;
        msg << "lg_field: grid truncates the mode: extent " << grid.extent
            << " m < 6 * beam radius (" << 6.0 * r_beam << " m)";
        throw SamplingError(msg.str());
    }

    ComplexField f(grid);
    const double inv_w2 = 1.0 / (wz * wz);
    for (int iy = 0; iy < grid.n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < grid.n; ++ix) {
            const double x = grid.coord(ix);
            const double r2 = x * x + y * y;
            const double phi = std::atan2(y, x);
            const double rho = std::sqrt(2.0 * r2) / wz;
            double radial = std::exp(-r2 * inv_w2);
            if (l > 0) radial *= std::pow(rho, l);
            if (mode.p > 0) radial *= std::assoc_laguerre(mode.p, l, 2.0 * r2 * inv_w2);
            // e^{+ikz} carrier convention: diverging wavefront +k r^2 / 2R,
            // Gouy phase retards.
            const double phase = mode.ell * phi + 0.5 * k * r2 * inv_R - gouy;
            f.at(ix, iy) = std::polar(radial, phase);
        }
    }
    f.normalize();
    return f;
}

ComplexField superpose(const SuperpositionSpec& spec, const GridSpec& grid, double waist,
                       double wavelength) {
    spec.validate();
    const int l = std::abs(spec.ell);
    LGModeSpec minus{-l, 0, waist, wavelength};
    LGModeSpec plus{l, 0, waist, wavelength};
    ComplexField fm = lg_field(minus, grid);
    ComplexField fp = lg_field(plus, grid);

    const double a_minus = std::sqrt(1.0 - spec.weight);
    const cplx a_plus = std::polar(std::sqrt(spec.weight), spec.theta);
    ComplexField out(grid);
    for (size_t i = 0; i < out.amp.size(); ++i)
        out.amp[i] = a_minus * fm.amp[i] + a_plus * fp.amp[i];
    out.normalize();
    return out;
}

cplx overlap(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("overlap: grid mismatch");
    cplx s = 0.0;
    for (size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s * (a.grid.pitch() * a.grid.pitch());
}

double analytic_fidelity(double theta_a, double theta_b) {
    const double c = std::cos(0.5 * (theta_b - theta_a));
    return c * c;
}

}  // namespace uwoam
