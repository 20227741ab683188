#pragma once

#include "csalsa/grid.hpp"

namespace csalsa {

// ---- soft threshold (l1 prox) ----------------------------------------------

/// Component-wise y -> sign(y) * max(|y| - tau, 0); exact minimizer of
/// 0.5*||x - v||^2 + tau*||x||_1.
std::vector<double> soft_threshold(const std::vector<double>& v, double tau);
Grid2D soft_threshold(const Grid2D& v, double tau);
CoeffStack soft_threshold(const CoeffStack& v, double tau);

// ---- isotropic total variation ----------------------------------------------

/// Sum over pixels of sqrt(dh^2 + dv^2), forward differences with
/// replicate-edge (Neumann) boundary.
double tv_value(const Grid2D& img);

/// Approximate minimizer of 0.5*||x - v||^2 + lambda*TV(x) via the dual
/// fixed-point projection iteration with step 1/8. Stops when the max-norm
/// change of the dual field drops below tol or after max_iters sweeps. The
/// returned image never has a larger objective than v itself.
Grid2D tv_prox(const Grid2D& v, double lambda, int max_iters, double tol);

// ---- Euclidean ball projection ----------------------------------------------

// Orthogonal projection onto the ball of the given radius: points outside
// are scaled back radially, points inside pass through. radius 0 maps
// everything to the center.

std::vector<double> project_ball(const std::vector<double>& v, double radius);
Grid2D project_ball(const Grid2D& v, double radius);
CVec project_ball(const CVec& v, double radius);

std::vector<double> project_ball(const std::vector<double>& v, double radius,
                                 const std::vector<double>& center);
Grid2D project_ball(const Grid2D& v, double radius, const Grid2D& center);
CVec project_ball(const CVec& v, double radius, const CVec& center);

// ---- regularizer dispatch -----------------------------------------------------

/// Convex penalty with an efficiently computable Moreau proximity map.
/// L1 acts on any coefficient layout; TVIso acts on images only.
struct Regularizer {
    enum class Kind { L1, TVIso };

    Kind kind = Kind::L1;
    int tv_inner_iters = 20;
    double tv_inner_tol = 1e-4;

    double value(const Grid2D& x) const;
    double value(const CoeffStack& x) const;

    Grid2D prox(double tau, const Grid2D& v) const;
    CoeffStack prox(double tau, const CoeffStack& v) const;
};

} // namespace csalsa
