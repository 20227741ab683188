#pragma once

#include "csalsa/grid.hpp"

namespace csalsa {

// Undecimated (a-trous) Haar frame with periodic boundaries. Filters carry a
// 1/2 factor per 1-D pass, which makes the analysis operator an isometry and
// the synthesis operator its exact adjoint, so synthesis(analysis(x)) == x:
// the frame is 1-tight (Parseval).
//
// Requires image dimensions divisible by 2^levels; otherwise the coarsest
// hole step would wrap past the image and the operator would change meaning,
// so non-compliant sizes are rejected.

/// Forward (analysis) transform; returns 3L detail planes plus approximation.
CoeffStack frame_analysis(const Grid2D& img, int levels);

/// Adjoint (synthesis) transform, the left inverse of frame_analysis.
Grid2D frame_synthesis(const CoeffStack& coeffs);

} // namespace csalsa
