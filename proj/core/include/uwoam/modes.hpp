#pragma once

#include <complex>

#include "uwoam/grid.hpp"

namespace uwoam {

/// Laguerre-Gaussian mode parameters. ell is the topological charge and
/// may be negative; p is the radial index.
struct LGModeSpec {
    int ell = 0;
    int p = 0;
    double waist = 0.01;          ///< w0 [m]
    double wavelength = 532e-9;   ///< [m]

    void validate() const;
};

/// A point on the order-ell Bloch sphere: the balanced case weight = 1/2
/// represents 1/sqrt(2) (|-ell> + e^{i theta} |+ell>).
struct SuperpositionSpec {
    int ell = 1;           ///< |ell| >= 1
    double theta = 0.0;    ///< relative phase [rad], reduced into [0, 2pi)
    double weight = 0.5;   ///< amplitude fraction of the +ell component

    void validate() const;

    /// Orientation of the petal pattern under the frozen angular
    /// convention: intensity ~ cos^2(ell*phi + theta/2), so the pattern
    /// axis sits at (-theta / (2 ell)) mod (pi / ell).
    double petal_orientation() const;
};

/// Raised when a grid cannot resolve the requested mode.
class SamplingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// LG_{p}^{ell} amplitude at propagation distance z, normalized to unit
/// power on the grid. Azimuth phi runs counter-clockwise from +x.
ComplexField lg_field(const LGModeSpec& mode, const GridSpec& grid, double z = 0.0);

/// sqrt(1-w) LG(-ell) + sqrt(w) e^{i theta} LG(+ell) at z = 0, renormalized.
ComplexField superpose(const SuperpositionSpec& spec, const GridSpec& grid,
                       double waist, double wavelength);

/// Discrete inner product sum conj(a) * b * pitch^2. Grids must match.
cplx overlap(const ComplexField& a, const ComplexField& b);

/// Projection probability between two balanced equal-ell superpositions:
/// cos^2((theta_b - theta_a) / 2). Independent of ell.
double analytic_fidelity(double theta_a, double theta_b);

/// Reduces an angle into [0, 2pi).
double wrap_2pi(double theta);

}  // namespace uwoam
