#pragma once

#include "csalsa/grid.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/proximity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csalsa {

/// A non-finite value appeared in an iterate; the message names the first
/// offending quantity.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveStatus { Converged, MaxIters };

struct SolverConfig {
    double mu1 = 1.0;
    double mu2 = 1.0;
    double epsilon = 0.0;
    int max_iters = 300;
    double feas_rtol = 1e-3;   // feasibility slack: accept ||res|| <= eps*(1+feas_rtol)
    double change_rtol = 1e-4; // relative iterate-change stop
    int tv_inner_iters = 20;
    double tv_inner_tol = 1e-4;

    void validate() const {
        if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw std::invalid_argument("mu1, mu2 must be positive");
        if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
        if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
        if (!(feas_rtol > 0.0) || !(change_rtol > 0.0))
            throw std::invalid_argument("tolerances must be positive");
        if (tv_inner_iters < 1 || !(tv_inner_tol > 0.0))
            throw std::invalid_argument("TV inner-loop parameters out of range");
    }
};

struct TraceRecord {
    int iter = 0;
    double res_w = 0.0;   // ||B w_k - y||
    double res_u = 0.0;   // ||B u_k - y||
    double phi_w = 0.0;   // regularizer value at w_k
    double gap_uw = 0.0;  // ||u_k - w_k||
    double mse = std::numeric_limits<double>::quiet_NaN();
    double elapsed_ms = 0.0;
};

struct SolverTrace {
    std::vector<TraceRecord> records;
};

/// Write the trace as CSV (fixed column set, 17 significant digits).
void write_trace_csv(const SolverTrace& trace, const std::string& path);

template <class Domain, class Obs>
struct SolverState {
    Domain u, w, c;
    Obs v, b;
    int k = 0;
};

template <class Domain, class Obs>
struct AdmmResult {
    SolverState<Domain, Obs> state;
    SolverTrace trace;
    SolveStatus status = SolveStatus::MaxIters;
};

/// Split problem min f1(w) + f2(v) s.t. v = G(u), w = u. G may be affine;
/// here it is u -> B u - y so that f2 is a norm-ball indicator at the origin.
template <class Domain, class Obs>
struct AdmmProblem {
    std::function<Obs(const Domain&)> G;
    std::function<double(const Domain&)> f1_value; // optional, for the trace
    double mu1 = 1.0;
    double mu2 = 1.0;
    /// Problem scale for the splitting-gap stop tests; negative means
    /// "derive from ||G(0)||" (the data norm for affine G).
    double gap_scale = -1.0;
};

namespace detail {

template <class Vec>
void check_finite(const Vec& x, const char* name, int iter) {
    if (!is_finite(x))
        throw NumericalFailure(std::string("non-finite value in iterate '") + name +
                               "' at iteration " + std::to_string(iter));
}

} // namespace detail

// Alternating-direction loop over the three blocks. The sub-minimizers are:
//   sub_u(tv, tw): argmin_u (mu1/mu2)*||G(u) - tv||^2 + ||u - tw||^2
//   sub_v(vp):     argmin_v f2(v) + (mu1/2)*||v - vp||^2
//   sub_w(wp):     argmin_w f1(w) + (mu2/2)*||w - wp||^2
// followed by the scaled-multiplier updates. One augmented term per
// constraint fixes every sign: with penalties ||G(u) - v - b||^2 and
// ||u - w - c||^2, the u-block targets (v + b, w + c), the v-block prox
// argument is G(u) - b, the w-block prox argument is u - c, and both
// multiplier estimates move against their residual:
//   b <- b - (G(u) - v),  c <- c - (u - w).
//
// Stops at max_iters, or as soon as all of the following hold:
//   - feasibility       ||G(w_k)|| <= eps*(1+feas_rtol)
//   - iterate changes   ||w_k - w_{k-1}|| <= change_rtol*||w_k||, same for v
//   - splitting gaps    ||u_k - w_k|| and ||G(u_k) - v_k|| <= change_rtol*scale
// where scale is the data norm. The change tests alone are not a fixed-point
// certificate: thresholded and projected blocks repeat transiently while the
// multipliers still move. Together with the gap tests they are: if w and v
// repeat and both constraint residuals vanish, then b and c are stationary
// and every subsequent iterate reproduces the current one.
template <class Domain, class Obs, class SubU, class SubV, class SubW>
AdmmResult<Domain, Obs> admm_generic(
    const AdmmProblem<Domain, Obs>& problem, SubU&& sub_u, SubV&& sub_v, SubW&& sub_w,
    const SolverConfig& cfg, SolverState<Domain, Obs> init,
    const std::function<double(const Domain&)>& mse_fn = {}) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    AdmmResult<Domain, Obs> out;
    out.state = std::move(init);
    auto& st = out.state;
    out.trace.records.reserve(std::size_t(std::min(cfg.max_iters, 4096)));

    const double gap_scale =
        problem.gap_scale >= 0.0 ? problem.gap_scale : norm2(problem.G(zeros_like(st.w)));

    Domain w_prev = st.w;
    Obs v_prev = st.v;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        st.u = sub_u(add(st.v, st.b), add(st.w, st.c));
        Obs Gu = problem.G(st.u);
        v_prev = std::move(st.v);
        st.v = sub_v(sub(Gu, st.b));
        w_prev = std::move(st.w);
        st.w = sub_w(sub(st.u, st.c));
        sub_in(st.b, sub(Gu, st.v));
        sub_in(st.c, sub(st.u, st.w));
        st.k = k;

        detail::check_finite(st.u, "u", k);
        detail::check_finite(st.v, "v", k);
        detail::check_finite(st.w, "w", k);
        detail::check_finite(st.b, "b", k);
        detail::check_finite(st.c, "c", k);

        Obs Gw = problem.G(st.w);
        TraceRecord rec;
        rec.iter = k;
        rec.res_w = norm2(Gw);
        rec.res_u = norm2(Gu);
        rec.phi_w = problem.f1_value ? problem.f1_value(st.w) : nan;
        rec.gap_uw = norm2(sub(st.u, st.w));
        rec.mse = mse_fn ? mse_fn(st.w) : nan;
        rec.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        out.trace.records.push_back(rec);

        const double w_change = norm2(sub(st.w, w_prev));
        const double v_change = norm2(sub(st.v, v_prev));
        const double gap_vGu = norm2(sub(Gu, st.v));
        if (rec.res_w <= cfg.epsilon * (1.0 + cfg.feas_rtol) &&
            w_change <= cfg.change_rtol * norm2(st.w) &&
            v_change <= cfg.change_rtol * norm2(st.v) &&
            rec.gap_uw <= cfg.change_rtol * gap_scale &&
            gap_vGu <= cfg.change_rtol * gap_scale) {
            out.status = SolveStatus::Converged;
            return out;
        }
    }
    out.status = SolveStatus::MaxIters;
    return out;
}

/// w0 = u0 = B^H y, v0 the ball projection of the initial residual, zero
/// multipliers.
template <linear_operator Op>
SolverState<typename Op::Domain, typename Op::Obs> default_init(const Op& op,
                                                                const typename Op::Obs& y,
                                                                double epsilon) {
    SolverState<typename Op::Domain, typename Op::Obs> st;
    st.w = op.adjoint(y);
    st.u = st.w;
    st.v = project_ball(sub(op.apply(st.w), y), epsilon);
    st.b = zeros_like(y);
    st.c = zeros_like(st.w);
    return st;
}

template <linear_operator Op>
struct SolveResult {
    typename Op::Domain x;
    SolverTrace trace;
    SolveStatus status = SolveStatus::MaxIters;
    int iterations = 0;
    /// ||B x - y|| at the returned iterate (initial residual when no
    /// iterations ran).
    double final_residual = 0.0;
    bool feasible = false;
};

/// Constrained solver: min phi(x) s.t. ||B x - y|| <= eps, run as the
/// three-block alternating scheme with the closed-form sub-solvers
/// (regularized inverse, ball projection, proximity map). Returns the
/// regularizer block w_K.
template <linear_operator Op>
SolveResult<Op> csalsa_solve(
    const Op& op, const typename Op::Obs& y, const Regularizer& reg_in, const SolverConfig& cfg,
    const std::optional<SolverState<typename Op::Domain, typename Op::Obs>>& init = std::nullopt,
    const std::function<double(const typename Op::Domain&)>& mse_fn = {}) {
    using Domain = typename Op::Domain;
    using Obs = typename Op::Obs;
    cfg.validate();

    Regularizer reg = reg_in;
    reg.tv_inner_iters = cfg.tv_inner_iters;
    reg.tv_inner_tol = cfg.tv_inner_tol;

    const double alpha = cfg.mu1 / cfg.mu2;
    const double w_tau = 1.0 / cfg.mu2;

    AdmmProblem<Domain, Obs> problem;
    problem.mu1 = cfg.mu1;
    problem.mu2 = cfg.mu2;
    problem.gap_scale = norm2(y);
    problem.G = [&op, &y](const Domain& u) { return sub(op.apply(u), y); };
    problem.f1_value = [&reg](const Domain& w) { return reg.value(w); };

    auto sub_u = [&](const Obs& tv, const Domain& tw) {
        // quadratic block: (alpha*B^H B + I) u = alpha*B^H (y + tv) + tw
        Domain rhs = op.adjoint(add(y, tv));
        scale_in(rhs, alpha);
        add_in(rhs, tw);
        return op.regularized_inverse(alpha, rhs);
    };
    auto sub_v = [&](const Obs& vp) { return project_ball(vp, cfg.epsilon); };
    auto sub_w = [&](const Domain& wp) { return reg.prox(w_tau, wp); };

    SolverState<Domain, Obs> st = init ? *init : default_init(op, y, cfg.epsilon);
    AdmmResult<Domain, Obs> res =
        admm_generic(problem, sub_u, sub_v, sub_w, cfg, std::move(st), mse_fn);

    SolveResult<Op> out;
    out.trace = std::move(res.trace);
    out.status = res.status;
    out.iterations = res.state.k;
    out.x = std::move(res.state.w);
    out.final_residual =
        out.trace.records.empty() ? norm2(sub(op.apply(out.x), y)) : out.trace.records.back().res_w;
    out.feasible = out.final_residual <= cfg.epsilon * (1.0 + cfg.feas_rtol);
    return out;
}

} // namespace csalsa
