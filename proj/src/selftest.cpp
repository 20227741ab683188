#include "csalsa/selftest.hpp"

#include "csalsa/bench.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/frame.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/proximity.hpp"
#include "csalsa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace csalsa {

namespace {

using Mat = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; fine at the n <= 256 oracle
// sizes used here.
std::vector<double> lu_solve(Mat a, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// flattening between structured vectors and plain arrays (complex values
// stack as [re..., im...])

std::vector<double> flatten(const Grid2D& g) { return g.v; }

std::vector<double> flatten(const CVec& y) {
    std::vector<double> out(2 * y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[i].real();
        out[y.size() + i] = y[i].imag();
    }
    return out;
}

std::vector<double> flatten(const CoeffStack& s) {
    std::vector<double> out;
    out.reserve(s.total_size());
    for (const auto& p : s.planes) out.insert(out.end(), p.v.begin(), p.v.end());
    return out;
}

Grid2D unflatten_grid(const std::vector<double>& v, int rows, int cols) {
    Grid2D g(rows, cols);
    g.v = v;
    return g;
}

CoeffStack unflatten_stack(const std::vector<double>& v, const CoeffStack& shape) {
    CoeffStack s = zeros_like(shape);
    std::size_t at = 0;
    for (auto& p : s.planes) {
        std::copy(v.begin() + at, v.begin() + at + p.size(), p.v.begin());
        at += p.size();
    }
    return s;
}

Grid2D random_grid(int rows, int cols, CounterRng& rng) {
    Grid2D g(rows, cols);
    for (auto& x : g.v) x = rng.gaussian();
    return g;
}

CVec random_cvec(std::size_t m, CounterRng& rng) {
    CVec y(m);
    for (auto& z : y) z = Complex(rng.gaussian(), rng.gaussian());
    return y;
}

CoeffStack random_stack(const CoeffStack& shape, CounterRng& rng) {
    CoeffStack s = zeros_like(shape);
    for (auto& p : s.planes)
        for (auto& x : p.v) x = rng.gaussian();
    return s;
}

double rel_err(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

double log_uniform(CounterRng& rng, double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

// Conjugate-symmetric random mask (every selected cell's mirror is selected),
// the regime in which the real-restricted inverse formula is exact.
SamplingMask random_symmetric_mask(int n, int picks, CounterRng& rng) {
    SamplingMask mask(n, n);
    mask.set(0, 0);
    for (int i = 0; i < picks; ++i) {
        const int r = int(rng.next_u64() % std::uint64_t(n));
        const int c = int(rng.next_u64() % std::uint64_t(n));
        mask.set(r, c);
        mask.set((n - r) % n, (n - c) % n);
    }
    return mask;
}

struct SuiteRunner {
    std::vector<CheckResult> results;
    std::string suite;

    void check(const std::string& name, bool pass, double worst, double tol) {
        std::ostringstream os;
        os << "worst " << worst << " (tol " << tol << ")";
        results.push_back({suite, name, pass, os.str()});
    }
    void check_flag(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({suite, name, pass, detail});
    }
};

// dense matrix whose columns are op.apply of basis vectors, with complex
// observations stacked as real pairs
template <class Op, class MakeBasis, class Flatten>
Mat dense_from_apply(const Op& op, std::size_t dom_dim, MakeBasis make_basis, Flatten flat) {
    Mat cols;
    for (std::size_t k = 0; k < dom_dim; ++k) cols.push_back(flat(op.apply(make_basis(k))));
    const std::size_t rows = cols[0].size();
    Mat b(rows, std::vector<double>(dom_dim));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < dom_dim; ++c) b[r][c] = cols[c][r];
    return b;
}

std::vector<double> mat_vec(const Mat& m, const std::vector<double>& x) {
    std::vector<double> y(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) y[r] += m[r][c] * x[c];
    return y;
}

std::vector<double> mat_t_vec(const Mat& m, const std::vector<double>& y) {
    std::vector<double> x(m.empty() ? 0 : m[0].size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) x[c] += m[r][c] * y[r];
    return x;
}

// H = alpha*B^T B + I
Mat normal_matrix(const Mat& b, double alpha) {
    const std::size_t n = b[0].size();
    Mat h(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < b.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) {
            if (b[r][i] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) h[i][j] += alpha * b[r][i] * b[r][j];
        }
    for (std::size_t i = 0; i < n; ++i) h[i][i] += 1.0;
    return h;
}

// -------- suites ------------------------------------------------------------

void dense_oracle_suite(SuiteRunner& run, const SelftestOptions& opts) {
    run.suite = "dense-oracle";
    CounterRng rng(opts.seed);
    const int n = 8;
    const int draws = opts.quick ? 10 : 50;
    const double tol = 1e-8;

    // circulant, with the dense matrix built straight from the kernel
    Grid2D kernel(3, 3);
    for (auto& x : kernel.v) x = rng.gaussian();
    const CirculantOp circ = make_circulant(kernel, n, n);
    {
        Mat dense(n * n, std::vector<double>(n * n, 0.0));
        const int cr = 1, cc = 1;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                for (int kr = 0; kr < 3; ++kr)
                    for (int kc = 0; kc < 3; ++kc) {
                        const int sr = ((r - (kr - cr)) % n + n) % n;
                        const int sc = ((c - (kc - cc)) % n + n) % n;
                        dense[r * n + c][sr * n + sc] += kernel.at(kr, kc);
                    }
        double worst = 0.0;
        for (int t = 0; t < draws; ++t) {
            Grid2D x = random_grid(n, n, rng);
            worst = std::max(worst, rel_err(flatten(circ.apply(x)), mat_vec(dense, x.v)));
        }
        run.check("circulant apply vs kernel-built matrix", worst <= tol, worst, tol);
    }

    // partial Fourier, dense matrix from explicit DFT entries
    const SamplingMask mask = random_symmetric_mask(n, 20, rng);
    const PartialFourierOp pf = make_partial_fourier(mask);
    {
        const std::size_t m = std::size_t(pf.measurements());
        Mat dense(2 * m, std::vector<double>(n * n, 0.0));
        const double scale = 1.0 / n; // 1/sqrt(n*n)
        for (std::size_t j = 0; j < m; ++j) {
            const int fr = pf.cells()[j] / n, fc = pf.cells()[j] % n;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const double ang =
                        -2.0 * std::numbers::pi * (double(fr) * r / n + double(fc) * c / n);
                    dense[j][r * n + c] = scale * std::cos(ang);
                    dense[m + j][r * n + c] = scale * std::sin(ang);
                }
        }
        double worst = 0.0;
        for (int t = 0; t < draws; ++t) {
            Grid2D x = random_grid(n, n, rng);
            worst = std::max(worst, rel_err(flatten(pf.apply(x)), mat_vec(dense, x.v)));
        }
        run.check("partial Fourier apply vs DFT-built matrix", worst <= tol, worst, tol);
    }

    // frame composite over the same circulant
    const FrameCompositeOp fc = make_frame_composite(circ, 1);
    const CoeffStack stack_shape = frame_analysis(Grid2D(n, n), 1);

    auto grid_basis = [n](std::size_t k) {
        Grid2D g(n, n);
        g.v[k] = 1.0;
        return g;
    };
    auto stack_basis = [&stack_shape](std::size_t k) {
        CoeffStack s = zeros_like(stack_shape);
        std::size_t at = k;
        for (auto& p : s.planes) {
            if (at < p.size()) {
                p.v[at] = 1.0;
                break;
            }
            at -= p.size();
        }
        return s;
    };
    auto flat_grid = [](const Grid2D& g) { return flatten(g); };
    auto flat_cvec = [](const CVec& y) { return flatten(y); };

    const Mat b_circ = dense_from_apply(circ, std::size_t(n) * n, grid_basis, flat_grid);
    const Mat b_pf = dense_from_apply(pf, std::size_t(n) * n, grid_basis, flat_cvec);
    const Mat b_fc = dense_from_apply(fc, stack_shape.total_size(), stack_basis, flat_grid);

    // adjoints against the dense transposes
    {
        double worst_c = 0.0, worst_p = 0.0, worst_f = 0.0;
        for (int t = 0; t < draws; ++t) {
            Grid2D yg = random_grid(n, n, rng);
            worst_c = std::max(worst_c, rel_err(flatten(circ.adjoint(yg)), mat_t_vec(b_circ, yg.v)));
            CVec yc = random_cvec(std::size_t(pf.measurements()), rng);
            worst_p =
                std::max(worst_p, rel_err(flatten(pf.adjoint(yc)), mat_t_vec(b_pf, flatten(yc))));
            Grid2D yf = random_grid(n, n, rng);
            worst_f = std::max(worst_f, rel_err(flatten(fc.adjoint(yf)), mat_t_vec(b_fc, yf.v)));
        }
        run.check("circulant adjoint vs dense transpose", worst_c <= tol, worst_c, tol);
        run.check("partial Fourier adjoint vs dense transpose", worst_p <= tol, worst_p, tol);
        run.check("frame composite adjoint vs dense transpose", worst_f <= tol, worst_f, tol);
    }

    // regularized inverses against dense linear solves
    auto inverse_check = [&](const char* name, const Mat& b, auto&& reg_inv, std::size_t dim) {
        double worst = 0.0;
        for (int t = 0; t < draws; ++t) {
            const double alpha = log_uniform(rng, 0.01, 100.0);
            std::vector<double> r(dim);
            for (auto& x : r) x = rng.gaussian();
            const std::vector<double> want = lu_solve(normal_matrix(b, alpha), r);
            worst = std::max(worst, rel_err(reg_inv(alpha, r), want));
        }
        run.check(name, worst <= tol, worst, tol);
    };
    inverse_check("circulant inverse vs dense solve", b_circ,
                  [&](double a, const std::vector<double>& r) {
                      return flatten(circ.regularized_inverse(a, unflatten_grid(r, n, n)));
                  },
                  std::size_t(n) * n);
    inverse_check("partial Fourier inverse vs dense solve", b_pf,
                  [&](double a, const std::vector<double>& r) {
                      return flatten(pf.regularized_inverse(a, unflatten_grid(r, n, n)));
                  },
                  std::size_t(n) * n);
    inverse_check("frame composite inverse vs dense solve", b_fc,
                  [&](double a, const std::vector<double>& r) {
                      return flatten(fc.regularized_inverse(a, unflatten_stack(r, stack_shape)));
                  },
                  stack_shape.total_size());
}

double pair_obs(const Grid2D& a, const Grid2D& b) { return dot(a, b); }
double pair_obs(const CVec& a, const CVec& b) { return dot_real(a, b); }
double pair_dom(const Grid2D& a, const Grid2D& b) { return dot(a, b); }
double pair_dom(const CoeffStack& a, const CoeffStack& b) { return dot(a, b); }

double& first_scalar(Grid2D& g) { return g.v[0]; }
double& first_scalar(CoeffStack& s) { return s.planes[0].v[0]; }

void adjoint_suite(SuiteRunner& run, const SelftestOptions& opts) {
    run.suite = "adjoint";
    CounterRng rng(opts.seed + 1);
    const int n = 8;
    const int trials = opts.quick ? 20 : 100;
    const double tol = 1e-10;

    Grid2D kernel(3, 3);
    for (auto& x : kernel.v) x = rng.gaussian();
    const CirculantOp circ = make_circulant(kernel, n, n);
    const PartialFourierOp pf = make_partial_fourier(random_symmetric_mask(n, 16, rng));
    const FrameCompositeOp fc = make_frame_composite(circ, 1);
    const CoeffStack stack_shape = frame_analysis(Grid2D(n, n), 1);

    const double bump = opts.perturb_adjoint ? 1e-6 : 0.0;

    auto identity_gap = [&](const auto& op, const auto& x, auto y) {
        const auto bx = op.apply(x);
        auto bty = op.adjoint(y);
        if (bump != 0.0) first_scalar(bty) += bump;
        const double lhs = pair_obs(bx, y);
        const double rhs = pair_dom(x, bty);
        return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    };

    double worst_c = 0.0, worst_p = 0.0, worst_f = 0.0, worst_rt = 0.0;
    for (int t = 0; t < trials; ++t) {
        worst_c = std::max(worst_c, identity_gap(circ, random_grid(n, n, rng),
                                                 random_grid(n, n, rng)));
        worst_p = std::max(worst_p, identity_gap(pf, random_grid(n, n, rng),
                                                 random_cvec(std::size_t(pf.measurements()), rng)));
        worst_f = std::max(worst_f, identity_gap(fc, random_stack(stack_shape, rng),
                                                 random_grid(n, n, rng)));
        // complex-domain selection identity B_full (B_full)^H = I
        CVec y = random_cvec(std::size_t(pf.measurements()), rng);
        CVec back = pf.apply_full(pf.adjoint_full(y));
        worst_rt = std::max(worst_rt, rel_err(flatten(back), flatten(y)));
    }
    run.check("circulant adjoint identity", worst_c <= tol, worst_c, tol);
    run.check("partial Fourier adjoint identity", worst_p <= tol, worst_p, tol);
    run.check("frame composite adjoint identity", worst_f <= tol, worst_f, tol);
    run.check("selection rows orthonormal", worst_rt <= tol, worst_rt, tol);
}

void parseval_suite(SuiteRunner& run, const SelftestOptions& opts) {
    run.suite = "parseval";
    CounterRng rng(opts.seed + 2);
    const int n = opts.quick ? 32 : 64;

    double worst_rt = 0.0, worst_norm = 0.0;
    for (int t = 0; t < 10; ++t) {
        Grid2D g = random_grid(n, n, rng);
        Spectrum2D s = fft2_unitary(g);
        worst_rt = std::max(worst_rt, rel_err(ifft2_unitary_real(s).v, g.v));
        worst_norm = std::max(worst_norm, std::abs(norm2(s) - norm2(g)) / norm2(g));
    }
    run.check("fft round trip", worst_rt <= 1e-12, worst_rt, 1e-12);
    run.check("fft norm preservation", worst_norm <= 1e-12, worst_norm, 1e-12);

    double worst_frame = 0.0, worst_proj = 0.0;
    for (int levels = 1; levels <= 4; ++levels) {
        Grid2D g = random_grid(n, n, rng);
        const CoeffStack coeffs = frame_analysis(g, levels);
        worst_frame = std::max(worst_frame, rel_err(frame_synthesis(coeffs).v, g.v));
        CoeffStack c = random_stack(coeffs, rng);
        const double before = norm2(c);
        const double after = norm2(frame_analysis(frame_synthesis(c), levels));
        worst_proj = std::max(worst_proj, (after - before * (1.0 + 1e-12)) / before);
    }
    run.check("frame synthesis-of-analysis identity (L=1..4)", worst_frame <= 1e-10, worst_frame,
              1e-10);
    run.check_flag("frame analysis-of-synthesis nonexpansive", worst_proj <= 0.0,
                   "norm growth bounded");
}

void prox_oracle_suite(SuiteRunner& run, const SelftestOptions& opts) {
    run.suite = "prox-oracle";
    CounterRng rng(opts.seed + 3);
    const int pairs = opts.quick ? 200 : 1000;

    // scalar brute force: golden-section minimization of the prox objective
    auto golden = [](double v, double tau) {
        double lo = -std::abs(v) - tau - 1.0, hi = std::abs(v) + tau + 1.0;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        auto f = [&](double x) { return 0.5 * (x - v) * (x - v) + tau * std::abs(x); };
        for (int it = 0; it < 90; ++it) {
            if (f(a) < f(b)) {
                hi = b;
                b = a;
                a = hi - gr * (hi - lo);
            } else {
                lo = a;
                a = b;
                b = lo + gr * (hi - lo);
            }
        }
        return 0.5 * (lo + hi);
    };
    double worst = 0.0;
    for (int t = 0; t < pairs; ++t) {
        const double v = 4.0 * rng.gaussian();
        const double tau = 2.0 * rng.uniform();
        const double got = soft_threshold(std::vector<double>{v}, tau)[0];
        worst = std::max(worst, std::abs(got - golden(v, tau)));
    }
    run.check("soft threshold vs scalar minimization", worst <= 1e-6, worst, 1e-6);

    // projection idempotence and radius bound
    bool idem = true;
    double worst_norm = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(16);
        for (auto& x : v) x = 3.0 * rng.gaussian();
        const double eps = rng.uniform() * 4.0;
        const auto p1 = project_ball(v, eps);
        const auto p2 = project_ball(p1, eps);
        idem = idem && (p1 == p2);
        worst_norm = std::max(worst_norm, norm2(p1) - eps * (1.0 + 1e-12));
    }
    run.check_flag("ball projection idempotent", idem, "bit-exact re-projection");
    run.check_flag("ball projection radius bound", worst_norm <= 0.0, "norm within eps*(1+1e-12)");

    // TV prox objective never worse than the input
    bool tv_ok = true;
    for (int t = 0; t < (opts.quick ? 3 : 10); ++t) {
        Grid2D v = random_grid(8, 8, rng);
        const double lambda = 0.1 + rng.uniform();
        Grid2D x = tv_prox(v, lambda, 30, 1e-5);
        const double fx = 0.5 * std::pow(norm2(sub(x, v)), 2) + lambda * tv_value(x);
        tv_ok = tv_ok && fx <= lambda * tv_value(v) * (1.0 + 1e-12) + 1e-15;
    }
    run.check_flag("tv prox objective decrease", tv_ok, "objective(prox) <= objective(input)");
}

void denoising_suite(SuiteRunner& run, const SelftestOptions& opts) {
    run.suite = "denoising-oracle";
    const int seeds = opts.quick ? 5 : 20;
    const double tol = 1e-5;

    Grid2D delta(1, 1);
    delta.v[0] = 1.0;
    const CirculantOp identity_op = make_circulant(delta, 8, 4); // n = 32

    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
        CounterRng rng(opts.seed + 100 + std::uint64_t(s));
        Grid2D y = random_grid(8, 4, rng);
        const double eps = 0.3 * norm2(y);

        // oracle: shrink every component by the bisection-calibrated threshold
        double lo = 0.0, hi = 0.0;
        for (double x : y.v) hi = std::max(hi, std::abs(x));
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (norm2(sub(soft_threshold(y, mid), y)) < eps ? lo : hi) = mid;
        }
        const Grid2D want = soft_threshold(y, 0.5 * (lo + hi));

        SolverConfig cfg;
        cfg.mu1 = cfg.mu2 = 1.0;
        cfg.epsilon = eps;
        cfg.max_iters = 200;
        cfg.change_rtol = 1e-9; // run close to the fixed point
        auto res = csalsa_solve(identity_op, y, Regularizer{Regularizer::Kind::L1}, cfg);
        double linf = 0.0;
        for (std::size_t i = 0; i < want.v.size(); ++i)
            linf = std::max(linf, std::abs(res.x.v[i] - want.v[i]));
        worst = std::max(worst, linf);
    }
    run.check("constrained denoiser vs bisection oracle", worst <= tol, worst, tol);
}

} // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& opts) {
    SuiteRunner run;
    dense_oracle_suite(run, opts);
    adjoint_suite(run, opts);
    parseval_suite(run, opts);
    prox_oracle_suite(run, opts);
    denoising_suite(run, opts);
    return run.results;
}

} // namespace csalsa
