#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwoam {

using cplx = std::complex<double>;

/// Uniform square sampling of the transverse plane. The sample at index
/// (n/2, n/2) sits exactly on the optical axis.
struct GridSpec {
    int n = 256;          ///< samples per side, power of two, >= 64
    double extent = 0.1;  ///< physical side length [m]

    double pitch() const { return extent / n; }

    /// Physical coordinate of sample index i (same in x and y).
    double coord(int i) const { return (i - n / 2) * pitch(); }

    void validate() const {
        if (n < 64)
            throw std::invalid_argument("GridSpec: n must be >= 64, got " + std::to_string(n));
        if ((n & (n - 1)) != 0)
            throw std::invalid_argument("GridSpec: n must be a power of two, got " + std::to_string(n));
        if (!(extent > 0.0))
            throw std::invalid_argument("GridSpec: extent must be positive");
    }

    bool operator==(const GridSpec& o) const { return n == o.n && extent == o.extent; }
};

/// Sampled complex optical amplitude. Units are sqrt(W)/m so that
/// norm2() = sum |a|^2 * pitch^2 is the carried power (1 when normalized).
struct ComplexField {
    GridSpec grid;
    std::vector<cplx> amp;  ///< row-major, amp[iy * n + ix]

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : grid(g), amp(static_cast<size_t>(g.n) * g.n) {}

    cplx& at(int ix, int iy) { return amp[static_cast<size_t>(iy) * grid.n + ix]; }
    const cplx& at(int ix, int iy) const { return amp[static_cast<size_t>(iy) * grid.n + ix]; }

    double norm2() const {
        double s = 0.0;
        for (const cplx& a : amp) s += std::norm(a);
        return s * grid.pitch() * grid.pitch();
    }

    /// Scales the field to norm2() == 1. Throws on an all-zero field.
    void normalize() {
        double n2 = norm2();
        if (!(n2 > 0.0)) throw std::runtime_error("ComplexField: cannot normalize zero field");
        double s = 1.0 / std::sqrt(n2);
        for (cplx& a : amp) a *= s;
    }

    /// Intensity-based 1/e^2 beam radius, 2 * rms radius of |a|^2.
    double beam_radius() const;
};

}  // namespace uwoam
