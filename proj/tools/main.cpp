#include "config.hpp"

#include "csalsa/bench.hpp"
#include "csalsa/io.hpp"
#include "csalsa/selftest.hpp"
#include "csalsa/solver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

using namespace csalsa;

// exit codes: 0 converged/feasible, 1 usage or I/O error, 2 ran but infeasible
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

int run_and_write(const ExperimentSpec& spec, const cli::OutputPaths& outputs, bool json_summary) {
    ExperimentOutput out = run_experiment(spec);
    out.report.trace_path = outputs.trace;

    if (!outputs.trace.empty()) write_trace_csv(out.trace, outputs.trace);
    if (!outputs.image.empty()) write_pgm16(outputs.image, out.reconstruction);
    if (!outputs.report.empty())
        write_text_file(outputs.report, report_to_json(out.report, &spec));

    std::cerr << spec.name << ": " << out.report.status << " after " << out.report.iterations
              << " iterations, residual " << out.report.final_residual << " (eps "
              << out.report.epsilon << "), mse " << out.report.mse << "\n";

    if (json_summary) {
        // the one machine-readable line on stdout
        std::printf("{\"name\":\"%s\",\"status\":\"%s\",\"feasible\":%s,\"iterations\":%d,"
                    "\"final_residual\":%.17g,\"epsilon\":%.17g,\"mse\":%.17g}\n",
                    out.report.name.c_str(), out.report.status.c_str(),
                    out.report.feasible ? "true" : "false", out.report.iterations,
                    out.report.final_residual, out.report.epsilon, out.report.mse);
    }
    return out.report.feasible ? kExitOk : kExitInfeasible;
}

int max_jobs_from_env(int requested) {
    if (const char* env = std::getenv("CSALSA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < requested) return cap;
    }
    return requested;
}

int run_batch(const std::vector<std::string>& configs, int jobs, bool json_summary) {
    jobs = max_jobs_from_env(std::max(1, jobs));
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kExitOk};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            int code;
            try {
                cli::RunConfig cfg = cli::parse_run_config(configs[i]);
                code = run_and_write(cfg.spec, cfg.outputs, json_summary);
            } catch (const std::exception& e) {
                std::cerr << configs[i] << ": error: " << e.what() << "\n";
                code = kExitError;
            }
            int cur = worst.load();
            // 1 (error) dominates 2 (infeasible) dominates 0
            auto rank = [](int c) { return c == kExitError ? 2 : (c == kExitInfeasible ? 1 : 0); };
            while (rank(code) > rank(cur) && !worst.compare_exchange_weak(cur, code)) {}
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(std::size_t(jobs), configs.size());
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return worst.load();
}

int run_selftest_cmd(bool quick, bool perturb_adjoint) {
    SelftestOptions opts;
    opts.quick = quick;
    opts.perturb_adjoint = perturb_adjoint;
    const auto results = run_selftest(opts);
    bool all_pass = true;
    std::string last_suite;
    for (const auto& r : results) {
        if (r.suite != last_suite) {
            std::fprintf(stderr, "[%s]\n", r.suite.c_str());
            last_suite = r.suite;
        }
        std::fprintf(stderr, "  %-46s %s  (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                     r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::fprintf(stderr, "%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
    return all_pass ? kExitOk : kExitError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained split augmented Lagrangian solver for imaging inverse problems"};
    app.require_subcommand(1);

    // deblur
    auto* deblur = app.add_subcommand("deblur", "frame-based deconvolution benchmark");
    std::string image_path, blur_name = "uniform9";
    ExperimentSpec dspec;
    dspec.problem = ExperimentSpec::Problem::Deblur;
    dspec.name = "deblur";
    cli::OutputPaths dout;
    double dmu = -1.0;
    bool djson = false;
    deblur->add_option("--image", image_path, "input PGM, or synthetic[:N]")->required();
    deblur->add_option("--blur", blur_name, "uniform9|gaussian|hij")
        ->check(CLI::IsMember({"uniform9", "gaussian", "hij"}));
    deblur->add_option("--sigma2", dspec.sigma2, "noise variance (0-255 pixel scale)");
    deblur->add_option("--eps-factor", dspec.eps_factor, "constraint radius scale");
    deblur->add_option("--mu", dmu, "penalty weight mu1=mu2");
    deblur->add_option("--max-iters", dspec.max_iters);
    deblur->add_option("--seed", dspec.seed);
    deblur->add_option("--frame-levels", dspec.frame_levels);
    deblur->add_option("--gaussian-size", dspec.blur.size);
    deblur->add_option("--gaussian-std", dspec.blur.std_dev);
    deblur->add_option("--hij-halfwidth", dspec.blur.halfwidth);
    deblur->add_option("--name", dspec.name);
    deblur->add_option("--out", dout.image, "reconstructed image (16-bit PGM)");
    deblur->add_option("--trace", dout.trace, "per-iteration CSV");
    deblur->add_option("--report", dout.report, "report JSON");
    deblur->add_flag("--json", djson, "print a one-line JSON summary on stdout");

    // mri
    auto* mri = app.add_subcommand("mri", "partial-Fourier phantom reconstruction");
    ExperimentSpec mspec;
    mspec.problem = ExperimentSpec::Problem::MRI;
    mspec.name = "mri";
    mspec.max_iters = 500;
    cli::OutputPaths mout;
    double mmu = -1.0;
    bool mjson = false;
    mri->add_option("--size", mspec.mri_size, "phantom side length");
    mri->add_option("--lines", mspec.mri_lines, "radial spectrum lines");
    mri->add_option("--sigma2", mspec.sigma2, "complex noise variance");
    mri->add_option("--eps-factor", mspec.eps_factor);
    mri->add_option("--mu", mmu, "penalty weight mu1=mu2");
    mri->add_option("--max-iters", mspec.max_iters);
    mri->add_option("--seed", mspec.seed);
    mri->add_option("--tv-inner-iters", mspec.tv_inner_iters);
    mri->add_option("--tv-inner-tol", mspec.tv_inner_tol);
    mri->add_option("--name", mspec.name);
    mri->add_option("--out", mout.image);
    mri->add_option("--trace", mout.trace);
    mri->add_option("--report", mout.report);
    mri->add_flag("--json", mjson);

    // solve from config
    auto* solve = app.add_subcommand("solve", "run a problem described by a JSON config");
    std::string config_path;
    bool sjson = false;
    solve->add_option("config", config_path, "config file path")->required();
    solve->add_flag("--json", sjson);

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle suites");
    bool quick = false, perturb = false;
    selftest->add_flag("--quick", quick, "reduced trial counts (seconds)");
    selftest->add_flag("--perturb-adjoint", perturb,
                       "negative control: inject an adjoint error, suites must fail");

    // batch
    auto* batch = app.add_subcommand("batch", "run several configs concurrently");
    std::vector<std::string> batch_configs;
    int jobs = 1;
    bool bjson = false;
    batch->add_option("--jobs", jobs, "worker threads (capped by CSALSA_THREADS)");
    batch->add_option("configs", batch_configs, "config files")->required();
    batch->add_flag("--json", bjson);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return kExitError;
    }

    try {
        if (deblur->parsed()) {
            if (blur_name == "uniform9") dspec.blur.kind = BlurKind::Uniform9;
            if (blur_name == "gaussian") dspec.blur.kind = BlurKind::Gaussian;
            if (blur_name == "hij") dspec.blur.kind = BlurKind::Hij;
            dspec.image = cli::parse_image_source(image_path);
            if (dmu > 0.0) dspec.mu = dmu;
            return run_and_write(dspec, dout, djson);
        }
        if (mri->parsed()) {
            if (mmu > 0.0) mspec.mu = mmu;
            return run_and_write(mspec, mout, mjson);
        }
        if (solve->parsed()) {
            cli::RunConfig cfg = cli::parse_run_config(config_path);
            return run_and_write(cfg.spec, cfg.outputs, sjson);
        }
        if (selftest->parsed()) return run_selftest_cmd(quick, perturb);
        if (batch->parsed()) return run_batch(batch_configs, jobs, bjson);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
