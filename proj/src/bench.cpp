#include "csalsa/bench.hpp"

#include "csalsa/io.hpp"
#include "csalsa/operators.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csalsa {

// ---- RNG -----------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t CounterRng::next_u64() {
    return splitmix64(seed_ + 0xD1B54A32D192ED03ULL * ++counter_);
}

double CounterRng::uniform() {
    // (0, 1]: never zero, so logs are safe
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

std::vector<double> add_noise(const std::vector<double>& y, double sigma2, std::uint64_t seed) {
    if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
    if (sigma2 == 0.0) return y;
    CounterRng rng(seed);
    const double sigma = std::sqrt(sigma2);
    std::vector<double> out = y;
    for (auto& x : out) x += sigma * rng.gaussian();
    return out;
}

Grid2D add_noise(const Grid2D& y, double sigma2, std::uint64_t seed) {
    Grid2D out = y;
    out.v = add_noise(y.v, sigma2, seed);
    return out;
}

CVec add_noise(const CVec& y, double sigma2, std::uint64_t seed) {
    if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
    if (sigma2 == 0.0) return y;
    CounterRng rng(seed);
    const double sigma = std::sqrt(sigma2 / 2.0);
    CVec out = y;
    for (auto& z : out) z += Complex(sigma * rng.gaussian(), sigma * rng.gaussian());
    return out;
}

double eps_from_noise(double sigma, std::size_t m, double factor) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (!(factor > 0.0)) throw std::invalid_argument("factor must be positive");
    return factor * sigma * std::sqrt(double(m));
}

// ---- phantom and scenes -----------------------------------------------------

const std::vector<Ellipse>& shepp_logan_ellipses() {
    static const std::vector<Ellipse> ellipses = {
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
    return ellipses;
}

Grid2D rasterize_ellipses(int n, const std::vector<Ellipse>& ellipses) {
    checked_extent(n, n);
    Grid2D img(n, n, 0.0);
    for (const auto& e : ellipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double ct = std::cos(phi), st = std::sin(phi);
        const double inv_a2 = 1.0 / (e.a * e.a), inv_b2 = 1.0 / (e.b * e.b);
        for (int r = 0; r < n; ++r) {
            const double y = 1.0 - (2.0 * r + 1.0) / n;
            for (int c = 0; c < n; ++c) {
                const double x = (2.0 * c + 1.0) / n - 1.0;
                const double dx = x - e.x0, dy = y - e.y0;
                const double xr = ct * dx + st * dy;
                const double yr = -st * dx + ct * dy;
                if (xr * xr * inv_a2 + yr * yr * inv_b2 <= 1.0) img.at(r, c) += e.intensity;
            }
        }
    }
    return img;
}

Grid2D shepp_logan(int n) {
    if (n < 32) throw std::invalid_argument("phantom size must be at least 32");
    Grid2D p = rasterize_ellipses(n, shepp_logan_ellipses());
    // intensity sums like 1.0 - 0.8 - 0.2 land a few ulp outside [0, 1]
    for (auto& v : p.v) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return p;
}

Grid2D synthetic_scene(int n) {
    checked_extent(n, n);
    Grid2D img(n, n);
    for (int r = 0; r < n; ++r) {
        const double yf = (r + 0.5) / n;
        for (int c = 0; c < n; ++c) {
            const double xf = (c + 0.5) / n;
            double val = 0.28 + 0.34 * xf * (1.0 - yf) + 0.12 * yf; // smooth background
            const double d1x = xf - 0.34, d1y = yf - 0.32;
            if (d1x * d1x + d1y * d1y < 0.17 * 0.17) val = 0.85;
            if (yf >= 0.56 && yf < 0.82 && xf >= 0.17 && xf < 0.46) val = 0.12;
            const double d2x = xf - 0.71, d2y = yf - 0.70;
            if (d2x * d2x + d2y * d2y < 0.09 * 0.09) val = 0.95;
            if (xf >= 0.86 && xf < 0.90 && yf >= 0.10 && yf < 0.90) val = 0.55;
            img.at(r, c) = val < 0.0 ? 0.0 : (val > 1.0 ? 1.0 : val);
        }
    }
    return img;
}

SamplingMask radial_mask(int n, int lines) {
    checked_extent(n, n);
    if (lines < 1) throw std::invalid_argument("need at least one radial line");
    SamplingMask mask(n, n);
    auto mark = [&](long dr, long dc) {
        const int r = int(((dr % n) + n) % n);
        const int c = int(((dc % n) + n) % n);
        mask.set(r, c);
    };
    mark(0, 0); // DC
    for (int l = 0; l < lines; ++l) {
        const double theta = std::numbers::pi * l / lines;
        const double dc = std::cos(theta), dr = std::sin(theta);
        // Both half-lines marked together keeps the mask centrally symmetric,
        // i.e. conjugate-symmetric for spectra of real images.
        if (std::abs(dc) >= std::abs(dr)) {
            const double slope = dr / dc;
            for (int t = 1; t <= n / 2; ++t) {
                const long off = std::lround(slope * t);
                mark(off, t);
                mark(-off, -t);
            }
        } else {
            const double slope = dc / dr;
            for (int t = 1; t <= n / 2; ++t) {
                const long off = std::lround(slope * t);
                mark(t, off);
                mark(-t, -off);
            }
        }
    }
    return mask;
}

// ---- blur kernels ----------------------------------------------------------

Grid2D make_blur_kernel(const BlurSpec& blur) {
    switch (blur.kind) {
    case BlurKind::Uniform9: {
        return Grid2D(9, 9, 1.0 / 81.0);
    }
    case BlurKind::Gaussian: {
        if (blur.size <= 0 || !(blur.std_dev > 0.0))
            throw std::invalid_argument("Gaussian kernel needs positive size and std");
        Grid2D k(blur.size, blur.size);
        const double h = (blur.size - 1) / 2.0;
        const double inv2s2 = 1.0 / (2.0 * blur.std_dev * blur.std_dev);
        double sum = 0.0;
        for (int r = 0; r < blur.size; ++r)
            for (int c = 0; c < blur.size; ++c) {
                const double dr = r - h, dc = c - h;
                k.at(r, c) = std::exp(-(dr * dr + dc * dc) * inv2s2);
                sum += k.at(r, c);
            }
        scale_in(k, 1.0 / sum);
        return k;
    }
    case BlurKind::Hij: {
        if (blur.halfwidth <= 0) throw std::invalid_argument("Hij kernel needs positive halfwidth");
        const int side = 2 * blur.halfwidth + 1;
        Grid2D k(side, side);
        double sum = 0.0;
        for (int i = -blur.halfwidth; i <= blur.halfwidth; ++i)
            for (int j = -blur.halfwidth; j <= blur.halfwidth; ++j) {
                const double val = 1.0 / (1.0 + double(i) * i + double(j) * j);
                k.at(i + blur.halfwidth, j + blur.halfwidth) = val;
                sum += val;
            }
        scale_in(k, 1.0 / sum);
        return k;
    }
    }
    throw std::invalid_argument("unknown blur kind");
}

// ---- metrics ---------------------------------------------------------------

double mse(const Grid2D& x, const Grid2D& x_true) {
    if (x.rows != x_true.rows || x.cols != x_true.cols)
        throw std::invalid_argument("shape mismatch in mse");
    detail::KahanSum s;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        const double d = x.v[i] - x_true.v[i];
        s.add(d * d);
    }
    return s.value() / double(x.v.size());
}

double isnr(const Grid2D& observed, const Grid2D& estimate, const Grid2D& x_true) {
    if (observed.rows != x_true.rows || observed.cols != x_true.cols ||
        estimate.rows != x_true.rows || estimate.cols != x_true.cols)
        throw std::invalid_argument("shape mismatch in isnr");
    const double num = mse(observed, x_true);
    const double den = mse(estimate, x_true);
    return 10.0 * std::log10(num / den);
}

// ---- experiments ------------------------------------------------------------

double default_mu(ExperimentSpec::Problem problem) {
    // Working scale is [0,1]; the per-iteration shrinkage weight is 1/mu2.
    // Calibrated on the benchmark problems: deblurring reaches the constraint
    // ball within ~60 iterations on all five blur/noise pairs, and the
    // noiseless 22-line reconstruction sits mid-basin (mse ~3e-6 at 128^2).
    return problem == ExperimentSpec::Problem::Deblur ? 1000.0 : 300.0;
}

namespace {

Grid2D load_source_image(const ImageSource& src, double& pixel_scale) {
    switch (src.kind) {
    case ImageSource::Kind::File: {
        PgmImage img = read_pgm(src.path);
        pixel_scale = double(img.maxval);
        Grid2D out = img.pixels;
        scale_in(out, 1.0 / pixel_scale);
        return out;
    }
    case ImageSource::Kind::Synthetic:
        // already unit-scaled; noise variances are still quoted on 0-255
        pixel_scale = 255.0;
        return synthetic_scene(src.n);
    case ImageSource::Kind::SheppLogan:
        pixel_scale = 1.0;
        return shepp_logan(src.n);
    }
    throw std::invalid_argument("unknown image source");
}

SolverConfig make_solver_config(const ExperimentSpec& spec, double mu, double epsilon) {
    SolverConfig cfg;
    cfg.mu1 = cfg.mu2 = mu;
    cfg.epsilon = epsilon;
    cfg.max_iters = spec.max_iters;
    cfg.feas_rtol = spec.feas_rtol;
    cfg.change_rtol = spec.change_rtol;
    cfg.tv_inner_iters = spec.tv_inner_iters;
    cfg.tv_inner_tol = spec.tv_inner_tol;
    return cfg;
}

ExperimentOutput run_deblur(const ExperimentSpec& spec) {
    double pixel_scale = 255.0;
    Grid2D x_true = load_source_image(spec.image, pixel_scale);
    const double sigma_working = std::sqrt(spec.sigma2) / pixel_scale;

    const Grid2D kernel = make_blur_kernel(spec.blur);
    const CirculantOp blur_op = make_circulant(kernel, x_true.rows, x_true.cols);
    const FrameCompositeOp op = make_frame_composite(blur_op, spec.frame_levels);

    Grid2D y = add_noise(blur_op.apply(x_true), sigma_working * sigma_working, spec.seed);
    const double epsilon = eps_from_noise(sigma_working, y.size(), spec.eps_factor);
    const double mu = spec.mu ? *spec.mu : default_mu(spec.problem);
    const SolverConfig cfg = make_solver_config(spec, mu, epsilon);

    Regularizer reg{Regularizer::Kind::L1};
    auto mse_fn = [&x_true](const CoeffStack& w) { return mse(frame_synthesis(w), x_true); };

    const auto t0 = std::chrono::steady_clock::now();
    auto result = csalsa_solve(op, y, reg, cfg, std::nullopt, mse_fn);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ExperimentOutput out;
    out.reconstruction = frame_synthesis(result.x);
    out.observation_image = y;
    out.ground_truth = x_true;
    out.trace = std::move(result.trace);

    Report& rep = out.report;
    rep.name = spec.name;
    rep.problem = "deblur";
    rep.status = result.status == SolveStatus::Converged ? "converged" : "max-iters";
    rep.feasible = result.feasible;
    rep.iterations = result.iterations;
    rep.elapsed_seconds = elapsed;
    rep.final_residual = result.final_residual;
    rep.epsilon = epsilon;
    rep.mse = mse(out.reconstruction, x_true);
    rep.isnr = isnr(y, out.reconstruction, x_true);
    rep.mu_used = mu;
    rep.pixel_scale = pixel_scale;
    rep.sigma_working = sigma_working;
    rep.adjoint_imag_rel = 0.0;
    rep.seed = spec.seed;
    return out;
}

ExperimentOutput run_mri(const ExperimentSpec& spec) {
    Grid2D x_true = shepp_logan(spec.mri_size);
    const SamplingMask mask = radial_mask(spec.mri_size, spec.mri_lines);
    const PartialFourierOp op = make_partial_fourier(mask);

    CVec y = op.apply(x_true);
    const double sigma_working = std::sqrt(spec.sigma2); // phantom is unit-scale
    if (spec.sigma2 > 0.0) y = add_noise(y, spec.sigma2, spec.seed);
    const double epsilon = spec.sigma2 > 0.0
                               ? eps_from_noise(sigma_working, y.size(), spec.eps_factor)
                               : 1e-6 * norm2(y);

    // magnitude of the imaginary content the real-image model discards
    const Spectrum2D back = op.adjoint_full(y);
    double imag_sq = 0.0;
    for (const auto& z : back.v) imag_sq += z.imag() * z.imag();
    const double adjoint_imag_rel = norm2(y) > 0.0 ? std::sqrt(imag_sq) / norm2(y) : 0.0;

    const double mu = spec.mu ? *spec.mu : default_mu(spec.problem);
    const SolverConfig cfg = make_solver_config(spec, mu, epsilon);

    Regularizer reg{Regularizer::Kind::TVIso};
    auto mse_fn = [&x_true](const Grid2D& w) { return mse(w, x_true); };

    const auto t0 = std::chrono::steady_clock::now();
    auto result = csalsa_solve(op, y, reg, cfg, std::nullopt, mse_fn);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ExperimentOutput out;
    out.reconstruction = std::move(result.x);
    out.observation_image = op.adjoint(y);
    out.ground_truth = x_true;
    out.trace = std::move(result.trace);

    Report& rep = out.report;
    rep.name = spec.name;
    rep.problem = "mri";
    rep.status = result.status == SolveStatus::Converged ? "converged" : "max-iters";
    rep.feasible = result.feasible;
    rep.iterations = result.iterations;
    rep.elapsed_seconds = elapsed;
    rep.final_residual = result.final_residual;
    rep.epsilon = epsilon;
    rep.mse = mse(out.reconstruction, x_true);
    rep.isnr = std::numeric_limits<double>::quiet_NaN();
    rep.mu_used = mu;
    rep.pixel_scale = 1.0;
    rep.sigma_working = sigma_working;
    rep.adjoint_imag_rel = adjoint_imag_rel;
    rep.seed = spec.seed;
    return out;
}

} // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    return spec.problem == ExperimentSpec::Problem::Deblur ? run_deblur(spec) : run_mri(spec);
}

namespace {

nlohmann::json spec_echo(const ExperimentSpec& spec) {
    nlohmann::json e;
    e["problem"] = spec.problem == ExperimentSpec::Problem::Deblur ? "deblur" : "mri";
    if (spec.problem == ExperimentSpec::Problem::Deblur) {
        const char* kind = spec.blur.kind == BlurKind::Uniform9
                               ? "uniform9"
                               : (spec.blur.kind == BlurKind::Gaussian ? "gaussian" : "hij");
        e["blur"] = {{"kind", kind}};
        if (spec.blur.kind == BlurKind::Gaussian) {
            e["blur"]["size"] = spec.blur.size;
            e["blur"]["std"] = spec.blur.std_dev;
        }
        if (spec.blur.kind == BlurKind::Hij) e["blur"]["halfwidth"] = spec.blur.halfwidth;
        e["frame_levels"] = spec.frame_levels;
        switch (spec.image.kind) {
        case ImageSource::Kind::File: e["image"] = spec.image.path; break;
        case ImageSource::Kind::Synthetic:
            e["image"] = "synthetic:" + std::to_string(spec.image.n);
            break;
        case ImageSource::Kind::SheppLogan:
            e["image"] = "shepplogan:" + std::to_string(spec.image.n);
            break;
        }
    } else {
        e["size"] = spec.mri_size;
        e["lines"] = spec.mri_lines;
    }
    e["sigma2"] = spec.sigma2;
    e["eps_factor"] = spec.eps_factor;
    e["max_iters"] = spec.max_iters;
    e["feas_rtol"] = spec.feas_rtol;
    e["change_rtol"] = spec.change_rtol;
    e["tv_inner_iters"] = spec.tv_inner_iters;
    e["tv_inner_tol"] = spec.tv_inner_tol;
    return e;
}

} // namespace

std::string report_to_json(const Report& report, const ExperimentSpec* spec) {
    nlohmann::json j;
    j["schema_version"] = 1;
    if (spec) j["experiment"] = spec_echo(*spec);
    j["name"] = report.name;
    j["problem"] = report.problem;
    j["status"] = report.status;
    j["feasible"] = report.feasible;
    j["iterations"] = report.iterations;
    j["elapsed_seconds"] = report.elapsed_seconds;
    j["final_residual"] = report.final_residual;
    j["epsilon"] = report.epsilon;
    j["mse"] = report.mse;
    j["isnr"] = std::isfinite(report.isnr) ? nlohmann::json(report.isnr) : nlohmann::json();
    j["mu"] = report.mu_used;
    j["pixel_scale"] = report.pixel_scale;
    j["sigma_working"] = report.sigma_working;
    j["adjoint_imag_rel"] = report.adjoint_imag_rel;
    j["seed"] = report.seed;
    j["trace"] = report.trace_path;
    return j.dump(2) + "\n";
}

} // namespace csalsa
