#pragma once

#include <complex>
#include <vector>

namespace mist::fft {

/// In-place 2D complex DFT of a row-major height x width buffer.
/// Forward transform is unnormalized; inverse includes the 1/(w*h) factor.
/// Not thread safe (plan creation is serialized by the backend).
void forward_2d(std::vector<std::complex<double>>& data, int width, int height);
void inverse_2d(std::vector<std::complex<double>>& data, int width, int height);

/// Angular frequencies 2*pi*f_j for an n-sample grid of spacing `pitch`,
/// in DFT bin order: f_j = j/(n*pitch) for j <= n/2, (j-n)/(n*pitch) above.
/// For even n the Nyquist bin j = n/2 carries -pi/pitch.
std::vector<double> angular_frequencies(int n, double pitch);

}  // namespace mist::fft
