#include "csalsa/proximity.hpp"

#include <cmath>
#include <stdexcept>

namespace csalsa {

namespace {

// Slack on the projection trigger: well above the few-ulp error of the
// compensated norm, far below the 1e-12 contract, so re-projecting an
// already-projected vector is a bit-exact no-op.
constexpr double kProjectSlack = 4e-15;

double soft_scalar(double y, double tau) {
    const double m = std::abs(y) - tau;
    return m > 0.0 ? (y < 0.0 ? -m : m) : 0.0;
}

void check_tau(double tau) {
    if (tau < 0.0) throw std::invalid_argument("threshold must be nonnegative");
}

} // namespace

std::vector<double> soft_threshold(const std::vector<double>& v, double tau) {
    check_tau(tau);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = soft_scalar(v[i], tau);
    return out;
}

Grid2D soft_threshold(const Grid2D& v, double tau) {
    check_tau(tau);
    Grid2D out(v.rows, v.cols);
    for (std::size_t i = 0; i < v.v.size(); ++i) out.v[i] = soft_scalar(v.v[i], tau);
    return out;
}

CoeffStack soft_threshold(const CoeffStack& v, double tau) {
    check_tau(tau);
    CoeffStack out = v;
    for (auto& p : out.planes)
        for (auto& x : p.v) x = soft_scalar(x, tau);
    return out;
}

// ---- total variation ---------------------------------------------------------

double tv_value(const Grid2D& img) {
    const int R = img.rows, C = img.cols;
    detail::KahanSum s;
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            const double dv = (r + 1 < R) ? img.at(r + 1, c) - img.at(r, c) : 0.0;
            const double dh = (c + 1 < C) ? img.at(r, c + 1) - img.at(r, c) : 0.0;
            s.add(std::sqrt(dv * dv + dh * dh));
        }
    }
    return s.value();
}

namespace {

// Forward-difference gradient with Neumann boundary; g1 rows, g2 cols.
void gradient(const Grid2D& x, Grid2D& g1, Grid2D& g2) {
    const int R = x.rows, C = x.cols;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            g1.at(r, c) = (r + 1 < R) ? x.at(r + 1, c) - x.at(r, c) : 0.0;
            g2.at(r, c) = (c + 1 < C) ? x.at(r, c + 1) - x.at(r, c) : 0.0;
        }
}

// Discrete divergence, the negative adjoint of the gradient above.
void divergence(const Grid2D& p1, const Grid2D& p2, Grid2D& out) {
    const int R = p1.rows, C = p1.cols;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            double d = 0.0;
            if (r == 0)
                d += p1.at(r, c);
            else if (r == R - 1)
                d -= p1.at(r - 1, c);
            else
                d += p1.at(r, c) - p1.at(r - 1, c);
            if (c == 0)
                d += p2.at(r, c);
            else if (c == C - 1)
                d -= p2.at(r, c - 1);
            else
                d += p2.at(r, c) - p2.at(r, c - 1);
            out.at(r, c) = d;
        }
}

} // namespace

Grid2D tv_prox(const Grid2D& v, double lambda, int max_iters, double tol) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const int R = v.rows, C = v.cols;
    const double tau_c = 1.0 / 8.0;

    Grid2D p1(R, C), p2(R, C);      // dual field, starts at zero
    Grid2D div_p(R, C), work(R, C), g1(R, C), g2(R, C);

    for (int it = 0; it < max_iters; ++it) {
        divergence(p1, p2, div_p);
        for (std::size_t i = 0; i < work.v.size(); ++i)
            work.v[i] = div_p.v[i] - v.v[i] / lambda;
        gradient(work, g1, g2);
        double max_change = 0.0;
        for (std::size_t i = 0; i < p1.v.size(); ++i) {
            const double mag = std::sqrt(g1.v[i] * g1.v[i] + g2.v[i] * g2.v[i]);
            const double denom = 1.0 + tau_c * mag;
            const double n1 = (p1.v[i] + tau_c * g1.v[i]) / denom;
            const double n2 = (p2.v[i] + tau_c * g2.v[i]) / denom;
            max_change = std::max({max_change, std::abs(n1 - p1.v[i]), std::abs(n2 - p2.v[i])});
            p1.v[i] = n1;
            p2.v[i] = n2;
        }
        if (max_change <= tol) break;
    }

    divergence(p1, p2, div_p);
    Grid2D x(R, C);
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] = v.v[i] - lambda * div_p.v[i];

    // The objective at the candidate must not exceed the objective at v.
    const double at_v = lambda * tv_value(v);
    double at_x = lambda * tv_value(x);
    {
        detail::KahanSum s;
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            const double d = x.v[i] - v.v[i];
            s.add(d * d);
        }
        at_x += 0.5 * s.value();
    }
    return at_x <= at_v ? x : v;
}

// ---- ball projection ---------------------------------------------------------

namespace {

template <class Vec>
Vec project_impl(const Vec& v, double radius) {
    if (radius < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
    const double n = norm2(v);
    if (n <= radius * (1.0 + kProjectSlack)) return v;
    Vec out = v;
    if (n == 0.0) return out;
    scale_in(out, radius / n);
    return out;
}

template <class Vec>
Vec project_impl(const Vec& v, double radius, const Vec& center) {
    Vec d = sub(v, center);
    d = project_impl(d, radius);
    add_in(d, center);
    return d;
}

} // namespace

std::vector<double> project_ball(const std::vector<double>& v, double radius) {
    return project_impl(v, radius);
}
Grid2D project_ball(const Grid2D& v, double radius) { return project_impl(v, radius); }
CVec project_ball(const CVec& v, double radius) { return project_impl(v, radius); }

std::vector<double> project_ball(const std::vector<double>& v, double radius,
                                 const std::vector<double>& center) {
    return project_impl(v, radius, center);
}
Grid2D project_ball(const Grid2D& v, double radius, const Grid2D& center) {
    return project_impl(v, radius, center);
}
CVec project_ball(const CVec& v, double radius, const CVec& center) {
    return project_impl(v, radius, center);
}

// ---- regularizer ---------------------------------------------------------------

double Regularizer::value(const Grid2D& x) const {
    if (kind == Kind::TVIso) return tv_value(x);
    detail::KahanSum s;
    for (double xi : x.v) s.add(std::abs(xi));
    return s.value();
}

double Regularizer::value(const CoeffStack& x) const {
    if (kind == Kind::TVIso)
        throw std::invalid_argument("TV regularizer is defined on images, not coefficient stacks");
    detail::KahanSum s;
    for (const auto& p : x.planes)
        for (double xi : p.v) s.add(std::abs(xi));
    return s.value();
}

Grid2D Regularizer::prox(double tau, const Grid2D& v) const {
    check_tau(tau);
    if (tau == 0.0) return v;
    if (kind == Kind::TVIso) return tv_prox(v, tau, tv_inner_iters, tv_inner_tol);
    return soft_threshold(v, tau);
}

CoeffStack Regularizer::prox(double tau, const CoeffStack& v) const {
    check_tau(tau);
    if (kind == Kind::TVIso)
        throw std::invalid_argument("TV regularizer is defined on images, not coefficient stacks");
    if (tau == 0.0) return v;
    return soft_threshold(v, tau);
}

} // namespace csalsa
