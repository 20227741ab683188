// Acceptance suite: quantitative exit criteria for the whole artifact, one
// PASS/FAIL line per criterion. Oracles come from tests/support (dense
// solves, brute-force minimizers, long-run references), never from the fast
// paths under test.

#include "csalsa/bench.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/frame.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/proximity.hpp"
#include "csalsa/solver.hpp"

#include "support/oracles.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace csalsa;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::string&)> fn;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- 1: dense-matrix oracles at 8x8 ----------------------------------------

bool criterion1(std::string& detail) {
    oracles::TestRng rng(1001);
    const int n = 8;
    const double tol = 1e-8;
    double worst = 0.0;

    Grid2D kernel = rng.grid(3, 3);
    const CirculantOp circ = make_circulant(kernel, n, n);
    const PartialFourierOp pf = make_partial_fourier(oracles::symmetric_mask(n, 14, rng));
    const FrameCompositeOp fc = make_frame_composite(circ, 1);
    const CoeffStack shape = frame_analysis(Grid2D(n, n), 1);

    auto grid_basis = [n](std::size_t k) {
        Grid2D g(n, n);
        g.v[k] = 1.0;
        return g;
    };
    auto stack_basis = [&shape](std::size_t k) {
        CoeffStack s = zeros_like(shape);
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

    const auto b_circ = oracles::dense_from_apply(circ, std::size_t(n) * n, grid_basis);
    const auto b_pf = oracles::dense_from_apply(pf, std::size_t(n) * n, grid_basis);
    const auto b_fc = oracles::dense_from_apply(fc, shape.total_size(), stack_basis);

    // independent apply oracle for the circulant family
    const auto dense_kernel = oracles::dense_circulant_from_kernel(kernel, n, n);

    for (int draw = 0; draw < 50; ++draw) {
        const double alpha = 0.01 * std::exp(rng.uniform() * std::log(1e4));

        Grid2D xg = rng.grid(n, n);
        worst = std::max(worst, oracles::rel_err(circ.apply(xg).v,
                                                 oracles::mat_vec(dense_kernel, xg.v)));

        Grid2D yg = rng.grid(n, n);
        worst = std::max(
            worst, oracles::rel_err(circ.adjoint(yg).v, oracles::mat_t_vec(b_circ, yg.v)));
        CVec yc = rng.cvec(std::size_t(pf.measurements()));
        worst = std::max(worst, oracles::rel_err(pf.adjoint(yc).v,
                                                 oracles::mat_t_vec(b_pf, oracles::flatten(yc))));
        Grid2D yf = rng.grid(n, n);
        worst = std::max(worst, oracles::rel_err(oracles::flatten(fc.adjoint(yf)),
                                                 oracles::mat_t_vec(b_fc, yf.v)));

        Grid2D r1 = rng.grid(n, n);
        worst = std::max(worst, oracles::rel_err(circ.regularized_inverse(alpha, r1).v,
                                                 oracles::solve_dense(
                                                     oracles::normal_matrix(b_circ, alpha), r1.v)));
        Grid2D r2 = rng.grid(n, n);
        worst = std::max(worst, oracles::rel_err(pf.regularized_inverse(alpha, r2).v,
                                                 oracles::solve_dense(
                                                     oracles::normal_matrix(b_pf, alpha), r2.v)));
        CoeffStack r3 = rng.stack(shape);
        worst = std::max(worst,
                         oracles::rel_err(oracles::flatten(fc.regularized_inverse(alpha, r3)),
                                          oracles::solve_dense(oracles::normal_matrix(b_fc, alpha),
                                                               oracles::flatten(r3))));
    }
    detail = fmt("worst relative error %.3g (tol %.0e), 50 draws x 3 kinds", worst, tol);
    return worst <= tol;
}

// ---- 2: adjoint identity and Parseval-frame round trips ----------------------

bool criterion2(std::string& detail) {
    oracles::TestRng rng(1002);
    const int n = 8;
    const double tol = 1e-10;
    double worst_adj = 0.0;

    Grid2D kernel = rng.grid(3, 3);
    const CirculantOp circ = make_circulant(kernel, n, n);
    const PartialFourierOp pf = make_partial_fourier(oracles::symmetric_mask(n, 14, rng));
    const FrameCompositeOp fc = make_frame_composite(circ, 1);
    const CoeffStack shape = frame_analysis(Grid2D(n, n), 1);

    for (int t = 0; t < 100; ++t) {
        {
            Grid2D x = rng.grid(n, n), y = rng.grid(n, n);
            const double l = dot(circ.apply(x), y), r = dot(x, circ.adjoint(y));
            worst_adj = std::max(worst_adj, std::abs(l - r) / std::max(std::abs(l), 1e-300));
        }
        {
            Grid2D x = rng.grid(n, n);
            CVec y = rng.cvec(std::size_t(pf.measurements()));
            const double l = dot_real(pf.apply(x), y), r = dot(x, pf.adjoint(y));
            worst_adj = std::max(worst_adj, std::abs(l - r) / std::max(std::abs(l), 1e-300));
        }
        {
            CoeffStack x = rng.stack(shape);
            Grid2D y = rng.grid(n, n);
            const double l = dot(fc.apply(x), y), r = dot(x, fc.adjoint(y));
            worst_adj = std::max(worst_adj, std::abs(l - r) / std::max(std::abs(l), 1e-300));
        }
    }

    double worst_frame = 0.0;
    for (int levels = 1; levels <= 4; ++levels) {
        Grid2D img = rng.grid(64, 64);
        worst_frame = std::max(
            worst_frame, oracles::rel_err(frame_synthesis(frame_analysis(img, levels)).v, img.v));
    }
    detail = fmt("adjoint worst %.3g, frame round-trip worst %.3g (tol %.0e)", worst_adj,
                 worst_frame, tol);
    return worst_adj <= tol && worst_frame <= tol;
}

// ---- 3: proximity oracles ------------------------------------------------------

bool criterion3(std::string& detail) {
    oracles::TestRng rng(1003);

    double worst_soft = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double v = 4.0 * rng.gaussian();
        const double tau = 2.0 * rng.uniform();
        const double got = soft_threshold(std::vector<double>{v}, tau)[0];
        worst_soft = std::max(worst_soft, std::abs(got - oracles::scalar_l1_prox(v, tau)));
    }

    Grid2D v = rng.grid(8, 8);
    const double lambda = 0.5;
    auto objective = [&](const Grid2D& x) {
        double q = 0.0;
        for (std::size_t i = 0; i < x.v.size(); ++i)
            q += (x.v[i] - v.v[i]) * (x.v[i] - v.v[i]);
        return 0.5 * q + lambda * oracles::naive_tv(x);
    };
    const double ref = objective(oracles::reference_tv_prox(v, lambda, 10000));
    const double got = objective(tv_prox(v, lambda, 10000, 0.0));
    const double tv_gap = (got - ref) / ref;

    bool idem = true;
    double norm_slack = -1.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> z(32);
        for (auto& x : z) x = 3.0 * rng.gaussian();
        const double eps = 4.0 * rng.uniform();
        const auto p1 = project_ball(z, eps);
        idem = idem && (project_ball(p1, eps) == p1);
        norm_slack = std::max(norm_slack, norm2(p1) - eps * (1.0 + 1e-12));
    }

    detail = fmt("soft worst %.3g (<=1e-6), tv objective gap %.3g (<=1e-4), projection %s",
                 worst_soft, tv_gap, idem && norm_slack <= 0.0 ? "exact" : "VIOLATED");
    return worst_soft <= 1e-6 && tv_gap <= 1e-4 && idem && norm_slack <= 0.0;
}

// ---- 4: constrained-denoising oracle -------------------------------------------

bool criterion4(std::string& detail) {
    Grid2D delta(1, 1);
    delta.v[0] = 1.0;
    const CirculantOp op = make_circulant(delta, 8, 4); // n = 32
    double worst = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        oracles::TestRng rng(2000 + seed);
        Grid2D y = rng.grid(8, 4);
        const double eps = 0.3 * norm2(y);
        const auto want = oracles::denoise_oracle(y.v, eps);
        SolverConfig cfg;
        cfg.epsilon = eps;
        cfg.max_iters = 200;
        cfg.change_rtol = 1e-9;
        auto res = csalsa_solve(op, y, Regularizer{Regularizer::Kind::L1}, cfg);
        for (std::size_t i = 0; i < want.size(); ++i)
            worst = std::max(worst, std::abs(res.x.v[i] - want[i]));
    }
    detail = fmt("worst l-inf gap %.3g (tol 1e-5), 20 seeds, n=32, <=200 iterations", worst);
    return worst <= 1e-5;
}

// ---- 5: desk-scale deblurring ---------------------------------------------------

ExperimentSpec deblur_spec(const char* name, BlurKind kind, double sigma2) {
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::Deblur;
    spec.name = name;
    spec.image = {ImageSource::Kind::Synthetic, "", 256};
    spec.blur.kind = kind;
    spec.sigma2 = sigma2;
    spec.seed = 7;
    spec.max_iters = 300;
    return spec;
}

const std::vector<ExperimentSpec>& table1_specs() {
    static const std::vector<ExperimentSpec> specs = {
        deblur_spec("exp1", BlurKind::Uniform9, 0.56 * 0.56),
        deblur_spec("exp2A", BlurKind::Gaussian, 2.0),
        deblur_spec("exp2B", BlurKind::Gaussian, 8.0),
        deblur_spec("exp3A", BlurKind::Hij, 2.0),
        deblur_spec("exp3B", BlurKind::Hij, 8.0),
    };
    return specs;
}

bool criterion5(std::string& detail) {
    const double t0 = now_seconds();
    bool ok = true;
    std::string parts;
    for (const auto& spec : table1_specs()) {
        const auto out = run_experiment(spec);
        int feas_at = -1;
        for (const auto& rec : out.trace.records)
            if (rec.res_w <= out.report.epsilon * (1.0 + 1e-3)) {
                feas_at = rec.iter;
                break;
            }
        const bool this_ok = feas_at > 0 && feas_at <= 300 && out.report.isnr > 0.0;
        ok = ok && this_ok;
        parts += fmt("%s[feas@%d isnr %.1fdB] ", spec.name.c_str(), feas_at, out.report.isnr);
    }
    const double elapsed = now_seconds() - t0;
    ok = ok && elapsed <= 600.0;
    detail = parts + fmt("total %.0fs (<=600s)", elapsed);
    return ok;
}

// ---- 6: desk-scale MRI ------------------------------------------------------------

bool criterion6(std::string& detail) {
    const double t0 = now_seconds();
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::MRI;
    spec.name = "mri128";
    spec.mri_size = 128;
    spec.mri_lines = 22;
    spec.sigma2 = 0.0;
    spec.max_iters = 500;
    const auto out = run_experiment(spec);
    const double elapsed = now_seconds() - t0;
    detail = fmt("mse %.3g (<=1e-5) in %d iterations, %.0fs (<=120s)", out.report.mse,
                 out.report.iterations, elapsed);
    return out.report.mse <= 1e-5 && out.report.iterations <= 500 && elapsed <= 120.0;
}

// ---- 7: per-iteration cost scaling -------------------------------------------------

double median5(std::array<double, 5> v) {
    std::sort(v.begin(), v.end());
    return v[2];
}

bool criterion7(std::string& detail) {
    auto time_at = [](int n) {
        const Grid2D kernel = make_blur_kernel({BlurKind::Uniform9});
        const CirculantOp blur = make_circulant(kernel, n, n);
        const FrameCompositeOp op = make_frame_composite(blur, 4);
        const Grid2D scene = synthetic_scene(n);
        const Grid2D y = blur.apply(scene);
        const CoeffStack r = frame_analysis(scene, 4);

        op.regularized_inverse(1.0, r); // warm up transform plans
        std::array<double, 5> inv{}, it{};
        for (int rep = 0; rep < 5; ++rep) {
            double t = now_seconds();
            op.regularized_inverse(1.0, r);
            inv[rep] = now_seconds() - t;

            SolverConfig cfg;
            cfg.mu1 = cfg.mu2 = 1000.0;
            cfg.epsilon = 0.01 * norm2(y);
            cfg.max_iters = 1;
            t = now_seconds();
            csalsa_solve(op, y, Regularizer{Regularizer::Kind::L1}, cfg);
            it[rep] = now_seconds() - t;
        }
        return std::pair{median5(inv), median5(it)};
    };

    const auto t128 = time_at(128);
    const auto t256 = time_at(256);
    const auto t512 = time_at(512);
    const double r1 = t256.first / t128.first, r2 = t512.first / t256.first;
    const double s1 = t256.second / t128.second, s2 = t512.second / t256.second;
    detail = fmt("inverse x%.1f x%.1f, iteration x%.1f x%.1f per side doubling (<=6x)", r1, r2,
                 s1, s2);
    return r1 <= 6.0 && r2 <= 6.0 && s1 <= 6.0 && s2 <= 6.0;
}

// ---- 8: constraint-evolution trace --------------------------------------------------

bool criterion8(std::string& detail) {
    const auto& spec = table1_specs()[0]; // the uniform-blur experiment
    auto out = run_experiment(spec);
    out.report.trace_path = "acceptance_exp1_trace.csv";
    write_trace_csv(out.trace, out.report.trace_path);

    // parse back: the emitted file itself is what must carry the curve
    std::ifstream in(out.report.trace_path);
    std::string line;
    std::getline(in, line);
    if (line != "iter,res_w,res_u,phi_w,gap_uw,mse,elapsed_ms") {
        detail = "unexpected CSV header: " + line;
        return false;
    }
    std::vector<double> res;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        res.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    if (res.empty()) {
        detail = "empty trace";
        return false;
    }
    const double eps_ok = out.report.epsilon * (1.0 + 1e-3);
    const double lowest = *std::min_element(res.begin(), res.end());
    const bool reaches = lowest <= eps_ok;
    const bool decreases = lowest < res.front();
    detail = fmt("res_w %.4g -> %.4g, eps*(1+1e-3) = %.4g, %zu rows in %s", res.front(), lowest,
                 eps_ok, res.size(), out.report.trace_path.c_str());
    return reaches && decreases;
}

// ---- 9: bit-exact reproducibility ----------------------------------------------------

bool criterion9(std::string& detail) {
    auto spec = table1_specs()[0];
    spec.max_iters = 120; // full curve not needed to certify reproducibility
    const auto a = run_experiment(spec);
    const auto b = run_experiment(spec);

    bool same = a.report.mse == b.report.mse &&
                a.report.final_residual == b.report.final_residual &&
                a.report.isnr == b.report.isnr && a.report.epsilon == b.report.epsilon &&
                a.report.iterations == b.report.iterations &&
                a.trace.records.size() == b.trace.records.size() &&
                a.reconstruction.v == b.reconstruction.v;
    for (std::size_t i = 0; same && i < a.trace.records.size(); ++i) {
        const auto &ra = a.trace.records[i], &rb = b.trace.records[i];
        same = ra.res_w == rb.res_w && ra.res_u == rb.res_u && ra.phi_w == rb.phi_w &&
               ra.gap_uw == rb.gap_uw && ra.mse == rb.mse;
    }

    ExperimentSpec mri;
    mri.problem = ExperimentSpec::Problem::MRI;
    mri.mri_size = 64;
    mri.mri_lines = 22;
    mri.sigma2 = 0.02; // exercise the complex noise path
    mri.seed = 3;
    mri.max_iters = 60;
    const auto m1 = run_experiment(mri);
    const auto m2 = run_experiment(mri);
    same = same && m1.report.mse == m2.report.mse &&
           m1.report.final_residual == m2.report.final_residual &&
           m1.reconstruction.v == m2.reconstruction.v;

    detail = same ? "deblur + noisy mri reruns bit-identical (timing excluded)"
                  : "reruns differ";
    return same;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "dense-matrix oracles agree with the fast operator paths", criterion1},
        {2, "adjoint identities and Parseval frame round trips", criterion2},
        {3, "proximity operators match brute-force references", criterion3},
        {4, "constrained denoising matches the bisection oracle", criterion4},
        {5, "five deblurring benchmarks feasible within 300 iterations", criterion5},
        {6, "radial-sampling reconstruction reaches mse 1e-5", criterion6},
        {7, "cost grows sub-6x per image-side doubling", criterion7},
        {8, "constraint-evolution trace emitted and decreasing", criterion8},
        {9, "seeded reruns reproduce every number bit-exactly", criterion9},
    };

    std::set<int> wanted;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "all") != 0) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::string detail;
        bool pass = false;
        try {
            pass = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        failures += !pass;
    }
    return failures == 0 ? 0 : 1;
}
