#include "csalsa/bench.hpp"

#include "support/oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>

using namespace csalsa;

TEST_CASE("blur kernels") {
    const Grid2D uni = make_blur_kernel({BlurKind::Uniform9});
    REQUIRE(uni.rows == 9);
    REQUIRE(uni.cols == 9);
    double sum = 0.0;
    for (double v : uni.v) {
        CHECK(v == doctest::Approx(1.0 / 81.0).epsilon(1e-14));
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    BlurSpec g{BlurKind::Gaussian, 9, 2.0, 7};
    const Grid2D gauss = make_blur_kernel(g);
    sum = 0.0;
    for (double v : gauss.v) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gauss.at(4, 4) > gauss.at(0, 0)); // peak at the center

    BlurSpec h{BlurKind::Hij, 9, 2.0, 7};
    const Grid2D hij = make_blur_kernel(h);
    REQUIRE(hij.rows == 15);
    sum = 0.0;
    for (double v : hij.v) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // normalization preserves the ratios 1/(1+i^2+j^2)
    CHECK(hij.at(7, 7) / hij.at(0, 0) == doctest::Approx(1.0 + 49.0 + 49.0).epsilon(1e-12));
    CHECK(hij.at(7, 7) / hij.at(7, 8) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_blur_kernel({BlurKind::Gaussian, 0, 2.0, 7}), std::invalid_argument);
    CHECK_THROWS_AS(make_blur_kernel({BlurKind::Gaussian, 9, 0.0, 7}), std::invalid_argument);
    CHECK_THROWS_AS(make_blur_kernel({BlurKind::Hij, 9, 2.0, 0}), std::invalid_argument);
}

TEST_CASE("noise generation is seeded and calibrated") {
    std::vector<double> y(1000, 1.0);
    CHECK(add_noise(y, 0.0, 7) == y); // exactly unchanged

    const auto a = add_noise(y, 0.25, 7);
    const auto b = add_noise(y, 0.25, 7);
    const auto c = add_noise(y, 0.25, 8);
    CHECK(a == b);
    CHECK(a != c);

    std::vector<double> big(100000, 0.0);
    const auto noisy = add_noise(big, 2.0, 99);
    double mean = 0.0;
    for (double v : noisy) mean += v;
    mean /= double(noisy.size());
    double var = 0.0;
    for (double v : noisy) var += (v - mean) * (v - mean);
    var /= double(noisy.size() - 1);
    CHECK(std::abs(var - 2.0) / 2.0 < 0.03);

    // complex: each part carries half the variance
    CVec z(100000, Complex(0.0, 0.0));
    const auto zn = add_noise(z, 2.0, 17);
    CHECK(add_noise(z, 0.0, 17) == z);
    double vr = 0.0, vi = 0.0;
    for (const auto& w : zn) {
        vr += w.real() * w.real();
        vi += w.imag() * w.imag();
    }
    CHECK(std::abs(vr / zn.size() - 1.0) < 0.03);
    CHECK(std::abs(vi / zn.size() - 1.0) < 0.03);
}

TEST_CASE("constraint radius rule") {
    CHECK(eps_from_noise(0.0, 100, 1.0) == 0.0);
    CHECK(eps_from_noise(0.56, 256 * 256, 1.0) == doctest::Approx(0.56 * 256.0).epsilon(1e-13));
    CHECK(eps_from_noise(0.5, 64, 2.0) == doctest::Approx(2.0 * eps_from_noise(0.5, 64, 1.0)));
    CHECK_THROWS_AS(eps_from_noise(-1.0, 10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eps_from_noise(1.0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eps_from_noise(1.0, 10, 0.0), std::invalid_argument);
}

TEST_CASE("phantom values, symmetry and resolution consistency") {
    CHECK_THROWS_AS(shepp_logan(31), std::invalid_argument);

    const Grid2D p = shepp_logan(64);
    for (double v : p.v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // the untilted centered ellipses rasterize mirror-symmetrically
    std::vector<Ellipse> symmetric;
    for (const auto& e : shepp_logan_ellipses())
        if (e.x0 == 0.0 && e.phi_deg == 0.0) symmetric.push_back(e);
    REQUIRE(symmetric.size() >= 5);
    const Grid2D s = rasterize_ellipses(64, symmetric);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) CHECK(s.at(r, c) == s.at(r, 63 - c));

    // box-downsampled 128 stays close to the direct 64 rasterization
    const Grid2D hi = shepp_logan(128);
    double mad = 0.0;
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) {
            const double avg = 0.25 * (hi.at(2 * r, 2 * c) + hi.at(2 * r + 1, 2 * c) +
                                       hi.at(2 * r, 2 * c + 1) + hi.at(2 * r + 1, 2 * c + 1));
            mad += std::abs(avg - p.at(r, c));
        }
    mad /= 64.0 * 64.0;
    CHECK(mad <= 0.05);
}

TEST_CASE("radial sampling masks") {
    CHECK_THROWS_AS(radial_mask(64, 0), std::invalid_argument);

    const SamplingMask one = radial_mask(64, 1);
    for (int c = 0; c < 64; ++c) CHECK(one.at(0, c)); // angle zero: the DC row
    CHECK(one.count() == 64);

    int prev = 0;
    for (int lines : {1, 2, 4, 8, 16, 32}) {
        const int m = radial_mask(64, lines).count();
        CHECK(m > prev);
        prev = m;
    }

    const SamplingMask m22 = radial_mask(128, 22);
    const double ratio = double(m22.count()) / (128.0 * 128.0);
    CHECK(ratio > 0.10);
    CHECK(ratio < 0.20);
    CHECK(m22.at(0, 0)); // DC always sampled

    // central symmetry, the conjugate-symmetry condition for real images
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c)
            CHECK(m22.at(r, c) == m22.at((128 - r) % 128, (128 - c) % 128));
}

TEST_CASE("error metrics") {
    oracles::TestRng rng(50);
    Grid2D x = rng.grid(8, 8);
    CHECK(mse(x, x) == 0.0);
    Grid2D y = rng.grid(8, 8);
    CHECK(isnr(y, y, x) == doctest::Approx(0.0)); // estimate == observation

    Grid2D d = rng.grid(8, 8);
    Grid2D x1 = x, x2 = x;
    add_in(x1, d);
    Grid2D d2 = d;
    scale_in(d2, 2.0);
    add_in(x2, d2);
    CHECK(mse(x2, x) == doctest::Approx(4.0 * mse(x1, x)).epsilon(1e-12));

    CHECK_THROWS_AS(mse(Grid2D(4, 4), Grid2D(8, 8)), std::invalid_argument);
    CHECK_THROWS_AS(isnr(Grid2D(4, 4), Grid2D(4, 4), Grid2D(8, 8)), std::invalid_argument);
}

TEST_CASE("synthetic scene is unit-scaled") {
    const Grid2D img = synthetic_scene(128);
    for (double v : img.v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(tv_value(img) > 0.0); // has edges
}

TEST_CASE("experiments are deterministic given spec and seed") {
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::Deblur;
    spec.name = "det";
    spec.image = {ImageSource::Kind::Synthetic, "", 64};
    spec.blur = {BlurKind::Uniform9};
    spec.sigma2 = 2.0;
    spec.seed = 31;
    spec.max_iters = 40;

    const auto a = run_experiment(spec);
    const auto b = run_experiment(spec);
    CHECK(a.report.mse == b.report.mse);
    CHECK(a.report.final_residual == b.report.final_residual);
    CHECK(a.report.isnr == b.report.isnr);
    CHECK(a.report.iterations == b.report.iterations);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].res_w == b.trace.records[i].res_w);
        CHECK(a.trace.records[i].mse == b.trace.records[i].mse);
    }
    CHECK(a.reconstruction.v == b.reconstruction.v);
}

TEST_CASE("noiseless identity-blur basis pursuit recovers the scene") {
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::Deblur;
    spec.name = "bp";
    spec.image = {ImageSource::Kind::Synthetic, "", 64};
    spec.blur = {BlurKind::Gaussian, 1, 1.0, 7}; // 1x1 kernel == identity
    spec.sigma2 = 0.0;                           // eps = 0: pure consistency
    spec.max_iters = 500;

    const auto out = run_experiment(spec);
    CHECK(out.report.epsilon == 0.0);
    CHECK(out.report.mse <= 1e-8);
}

TEST_CASE("small mri run produces a sane report") {
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::MRI;
    spec.name = "mri-small";
    spec.mri_size = 64;
    spec.mri_lines = 22;
    spec.max_iters = 150;

    const auto out = run_experiment(spec);
    CHECK(out.report.problem == "mri");
    CHECK(out.report.mse < 1e-2);
    CHECK(out.report.adjoint_imag_rel < 1e-12); // symmetric mask, real phantom
    CHECK(std::isnan(out.report.isnr));
    CHECK((out.report.status == "converged" || out.report.status == "max-iters"));
    CHECK(out.report.epsilon == doctest::Approx(1e-6 * norm2(make_partial_fourier(
                                                           radial_mask(64, 22))
                                                           .apply(shepp_logan(64)))));

    const std::string json = report_to_json(out.report, &spec);
    CHECK(json.find("\"schema_version\": 1") != std::string::npos);
    CHECK(json.find("\"problem\": \"mri\"") != std::string::npos);
    CHECK(json.find("\"experiment\"") != std::string::npos);
    CHECK(json.find("\"lines\": 22") != std::string::npos);
}

#ifdef CSALSA_SOURCE_DIR
TEST_CASE("report json conforms to the published schema") {
    ExperimentSpec spec;
    spec.problem = ExperimentSpec::Problem::Deblur;
    spec.name = "schema";
    spec.image = {ImageSource::Kind::Synthetic, "", 64};
    spec.sigma2 = 2.0;
    spec.max_iters = 3;
    const auto out = run_experiment(spec);

    const nlohmann::json report = nlohmann::json::parse(report_to_json(out.report, &spec));
    std::ifstream schema_in(std::string(CSALSA_SOURCE_DIR) + "/docs/report.schema.json");
    REQUIRE(schema_in.good());
    const nlohmann::json schema = nlohmann::json::parse(schema_in);

    // structural validation: every required key present, no keys beyond the
    // declared properties
    for (const auto& req : schema.at("required"))
        CHECK_MESSAGE(report.contains(req.get<std::string>()),
                      "missing field " << req.get<std::string>());
    const auto& props = schema.at("properties");
    for (auto it = report.begin(); it != report.end(); ++it)
        CHECK_MESSAGE(props.contains(it.key()), "undeclared field " << it.key());
}
#endif
