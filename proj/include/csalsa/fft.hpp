#pragma once

#include "csalsa/grid.hpp"

namespace csalsa {

// Unitary 2-D DFT pair: both directions carry the 1/sqrt(rows*cols) factor,
// so forward/inverse are exact inverses and both preserve the l2 norm.

Spectrum2D fft2_unitary(const Grid2D& g);
Spectrum2D fft2_unitary(const Spectrum2D& g);
Spectrum2D ifft2_unitary(const Spectrum2D& s);

/// Inverse transform keeping only the real part (for real-image targets).
Grid2D ifft2_unitary_real(const Spectrum2D& s);

} // namespace csalsa
