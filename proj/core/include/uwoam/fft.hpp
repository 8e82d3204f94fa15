#pragma once

#include <complex>
#include <vector>

namespace uwoam::fft {

/// In-place unnormalized forward 2-D FFT of an n x n row-major array.
void forward(std::vector<std::complex<double>>& a, int n);

/// In-place inverse 2-D FFT including the 1/n^2 normalization, so that
/// inverse(forward(x)) == x up to rounding.
void inverse(std::vector<std::complex<double>>& a, int n);

/// In-place unnormalized backward transform (no 1/n^2 factor).
void backward_raw(std::vector<std::complex<double>>& a, int n);

/// FFT sample frequency for index j of an n-point transform, in cycles
/// per unit length given the sample pitch.
inline double freq(int j, int n, double pitch) {
    int k = (j < n / 2) ? j : j - n;
    return k / (n * pitch);
}

}  // namespace uwoam::fft
