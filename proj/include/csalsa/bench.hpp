#pragma once

#include "csalsa/grid.hpp"
#include "csalsa/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace csalsa {

// ---- deterministic noise -----------------------------------------------------

/// Counter-based generator: every draw is a pure function of (seed, counter),
/// so streams are reproducible and independent runs cannot interleave.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    double uniform();  // (0, 1)
    double gaussian(); // standard normal, Box-Muller

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Add i.i.d. zero-mean Gaussian noise of variance sigma2.
std::vector<double> add_noise(const std::vector<double>& y, double sigma2, std::uint64_t seed);
Grid2D add_noise(const Grid2D& y, double sigma2, std::uint64_t seed);
/// Complex variant: independent real/imaginary parts, each of variance
/// sigma2/2, so E|n_i|^2 = sigma2.
CVec add_noise(const CVec& y, double sigma2, std::uint64_t seed);

/// Constraint radius from the noise level: eps = factor * sigma * sqrt(m),
/// the expected residual norm of the true signal.
double eps_from_noise(double sigma, std::size_t m, double factor);

// ---- test data -----------------------------------------------------------------

struct Ellipse {
    double intensity;
    double a, b;       // semi-axes
    double x0, y0;     // center in [-1, 1]^2
    double phi_deg;    // rotation
};

/// The ten head-phantom ellipses (contrast variant with values in [0, 1]).
const std::vector<Ellipse>& shepp_logan_ellipses();

/// Rasterize additive ellipses on an n x n grid over [-1, 1]^2, sampling at
/// pixel centers.
Grid2D rasterize_ellipses(int n, const std::vector<Ellipse>& ellipses);

/// Standard 10-ellipse head phantom at n x n, n >= 32, values in [0, 1].
Grid2D shepp_logan(int n);

/// Deterministic piecewise-smooth grayscale scene in [0, 1]; stands in for a
/// photographic test image so runs need no external files.
Grid2D synthetic_scene(int n);

/// Spectrum sampling mask of `lines` equispaced radial lines through the DC
/// cell (Bresenham over the centered grid, then shifted to DFT layout). The
/// mask is centrally symmetric, hence conjugate-symmetric for real images,
/// and always contains DC.
SamplingMask radial_mask(int n, int lines);

// ---- blur kernels ----------------------------------------------------------------

enum class BlurKind { Uniform9, Gaussian, Hij };

struct BlurSpec {
    BlurKind kind = BlurKind::Uniform9;
    int size = 9;        // Gaussian support
    double std_dev = 2.0;
    int halfwidth = 7;   // Hij support half-width (kernel side 2*halfwidth+1)
};

/// Unit-sum blur kernel: 9x9 uniform, sampled Gaussian, or 1/(1+i^2+j^2).
Grid2D make_blur_kernel(const BlurSpec& blur);

// ---- metrics ---------------------------------------------------------------------

double mse(const Grid2D& x, const Grid2D& x_true);
/// Improvement in SNR of the estimate over the raw observation, in dB.
double isnr(const Grid2D& observed, const Grid2D& estimate, const Grid2D& x_true);

// ---- experiments -----------------------------------------------------------------

struct ImageSource {
    enum class Kind { File, Synthetic, SheppLogan };
    Kind kind = Kind::Synthetic;
    std::string path;
    int n = 256;
};

struct ExperimentSpec {
    std::string name;
    enum class Problem { Deblur, MRI } problem = Problem::Deblur;

    // deblurring
    BlurSpec blur;
    ImageSource image;
    int frame_levels = 4;

    // MRI
    int mri_size = 128;
    int mri_lines = 22;

    double sigma2 = 0.0; // noise variance; for file/synthetic images on the 0-255 scale
    double eps_factor = 1.0;
    std::uint64_t seed = 0;

    std::optional<double> mu; // mu1 = mu2; problem-dependent default when unset
    int max_iters = 300;
    double feas_rtol = 1e-3;
    double change_rtol = 1e-4;
    int tv_inner_iters = 20;
    double tv_inner_tol = 1e-4;
};

struct Report {
    std::string name;
    std::string problem;
    std::string status; // "converged" | "max-iters"
    bool feasible = false;
    int iterations = 0;
    double elapsed_seconds = 0.0;
    double final_residual = 0.0;
    double epsilon = 0.0;
    double mse = 0.0;
    double isnr = 0.0; // NaN for MRI
    double mu_used = 0.0;
    double pixel_scale = 1.0; // divisor applied to raw pixel values
    double sigma_working = 0.0;
    double adjoint_imag_rel = 0.0; // residual imaginary magnitude (MRI only)
    std::uint64_t seed = 0;
    std::string trace_path;
};

struct ExperimentOutput {
    Report report;
    SolverTrace trace;
    Grid2D reconstruction;
    Grid2D observation_image; // deblur: blurred noisy image; MRI: zero-fill recon
    Grid2D ground_truth;
};

/// Run one declarative experiment end to end. Writes nothing; callers decide
/// where traces/reports/images go.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Default coupling constant when ExperimentSpec.mu is unset.
double default_mu(ExperimentSpec::Problem problem);

/// Serialize a report as a JSON object string (schema_version 1). The
/// experiment description, when given, is echoed under an "experiment" key so
/// results are self-describing.
std::string report_to_json(const Report& report, const ExperimentSpec* spec = nullptr);

} // namespace csalsa
