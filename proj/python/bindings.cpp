#include "csalsa/bench.hpp"
#include "csalsa/fft.hpp"
#include "csalsa/frame.hpp"
#include "csalsa/operators.hpp"
#include "csalsa/proximity.hpp"
#include "csalsa/solver.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace csalsa;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;
using BArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

Grid2D to_grid(const DArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D real array");
    Grid2D g(int(a.shape(0)), int(a.shape(1)));
    std::copy(a.data(), a.data() + g.size(), g.v.begin());
    return g;
}

py::array_t<double> from_grid(const Grid2D& g) {
    py::array_t<double> out({g.rows, g.cols});
    std::copy(g.v.begin(), g.v.end(), out.mutable_data());
    return out;
}

Spectrum2D to_spectrum(const CArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D complex array");
    Spectrum2D s(int(a.shape(0)), int(a.shape(1)));
    std::copy(a.data(), a.data() + s.size(), s.v.begin());
    return s;
}

py::array_t<Complex> from_spectrum(const Spectrum2D& s) {
    py::array_t<Complex> out({s.rows, s.cols});
    std::copy(s.v.begin(), s.v.end(), out.mutable_data());
    return out;
}

CVec to_cvec(const CArray& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D complex array");
    return CVec(a.data(), a.data() + a.shape(0));
}

py::array_t<Complex> from_cvec(const CVec& y) {
    py::array_t<Complex> out(std::vector<py::ssize_t>{py::ssize_t(y.size())});
    std::copy(y.begin(), y.end(), out.mutable_data());
    return out;
}

CoeffStack to_stack(const DArray& a) {
    if (a.ndim() != 3) throw std::invalid_argument("expected a 3-D coefficient array");
    const int planes = int(a.shape(0));
    if (planes < 4 || (planes - 1) % 3 != 0)
        throw std::invalid_argument("coefficient array must hold 3*levels + 1 planes");
    CoeffStack s;
    s.levels = (planes - 1) / 3;
    const int rows = int(a.shape(1)), cols = int(a.shape(2));
    const double* p = a.data();
    for (int k = 0; k < planes; ++k) {
        Grid2D g(rows, cols);
        std::copy(p, p + g.size(), g.v.begin());
        p += g.size();
        s.planes.push_back(std::move(g));
    }
    return s;
}

py::array_t<double> from_stack(const CoeffStack& s) {
    py::array_t<double> out({int(s.planes.size()), s.rows(), s.cols()});
    double* p = out.mutable_data();
    for (const auto& plane : s.planes) {
        std::copy(plane.v.begin(), plane.v.end(), p);
        p += plane.size();
    }
    return out;
}

SamplingMask to_mask(const BArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D boolean mask");
    SamplingMask m(int(a.shape(0)), int(a.shape(1)));
    for (std::size_t i = 0; i < m.selected.size(); ++i) m.selected[i] = a.data()[i] ? 1 : 0;
    return m;
}

py::array_t<bool> from_mask(const SamplingMask& m) {
    py::array_t<bool> out({m.rows, m.cols});
    for (std::size_t i = 0; i < m.selected.size(); ++i)
        out.mutable_data()[i] = m.selected[i] != 0;
    return out;
}

SolverConfig make_config(double mu, double epsilon, int max_iters, double feas_rtol,
                         double change_rtol, int tv_inner_iters, double tv_inner_tol) {
    SolverConfig cfg;
    cfg.mu1 = cfg.mu2 = mu;
    cfg.epsilon = epsilon;
    cfg.max_iters = max_iters;
    cfg.feas_rtol = feas_rtol;
    cfg.change_rtol = change_rtol;
    cfg.tv_inner_iters = tv_inner_iters;
    cfg.tv_inner_tol = tv_inner_tol;
    return cfg;
}

py::dict trace_dict(const SolverTrace& trace) {
    const py::ssize_t count = py::ssize_t(trace.records.size());
    const std::vector<py::ssize_t> n{count};
    py::array_t<double> res_w(n), res_u(n), phi_w(n), gap(n), mse(n), ms(n);
    for (py::ssize_t i = 0; i < count; ++i) {
        const auto& r = trace.records[std::size_t(i)];
        res_w.mutable_data()[i] = r.res_w;
        res_u.mutable_data()[i] = r.res_u;
        phi_w.mutable_data()[i] = r.phi_w;
        gap.mutable_data()[i] = r.gap_uw;
        mse.mutable_data()[i] = r.mse;
        ms.mutable_data()[i] = r.elapsed_ms;
    }
    py::dict d;
    d["res_w"] = res_w;
    d["res_u"] = res_u;
    d["phi_w"] = phi_w;
    d["gap_uw"] = gap;
    d["mse"] = mse;
    d["elapsed_ms"] = ms;
    return d;
}

template <class Op, class ToDomain, class FromDomain, class ToObs>
py::dict solve_impl(const Op& op, const py::object& y_obj, const std::string& reg_kind,
                    const SolverConfig& cfg, ToDomain, FromDomain from_domain, ToObs to_obs) {
    Regularizer reg;
    if (reg_kind == "l1")
        reg.kind = Regularizer::Kind::L1;
    else if (reg_kind == "tv")
        reg.kind = Regularizer::Kind::TVIso;
    else
        throw std::invalid_argument("regularizer must be 'l1' or 'tv'");

    auto y = to_obs(y_obj);
    auto res = csalsa_solve(op, y, reg, cfg);
    py::dict out;
    out["x"] = from_domain(res.x);
    out["status"] = res.status == SolveStatus::Converged ? "converged" : "max-iters";
    out["iterations"] = res.iterations;
    out["final_residual"] = res.final_residual;
    out["feasible"] = res.feasible;
    out["trace"] = trace_dict(res.trace);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "constrained split augmented Lagrangian solver for imaging inverse problems";

    // transforms
    m.def(
        "fft2_unitary", [](const DArray& g) { return from_spectrum(fft2_unitary(to_grid(g))); },
        "Unitary 2-D DFT of a real array.");
    m.def(
        "fft2_unitary_c",
        [](const CArray& g) { return from_spectrum(fft2_unitary(to_spectrum(g))); },
        "Unitary 2-D DFT of a complex array.");
    m.def(
        "ifft2_unitary",
        [](const CArray& s) { return from_spectrum(ifft2_unitary(to_spectrum(s))); },
        "Unitary inverse 2-D DFT.");
    m.def(
        "frame_analysis",
        [](const DArray& img, int levels) { return from_stack(frame_analysis(to_grid(img), levels)); },
        py::arg("img"), py::arg("levels"),
        "Undecimated Haar analysis: (3*levels+1, rows, cols) coefficient planes.");
    m.def(
        "frame_synthesis",
        [](const DArray& coeffs) { return from_grid(frame_synthesis(to_stack(coeffs))); },
        py::arg("coeffs"), "Adjoint/synthesis transform, inverse of frame_analysis.");

    // proximity
    m.def(
        "soft_threshold",
        [](const DArray& v, double tau) { return from_grid(soft_threshold(to_grid(v), tau)); },
        py::arg("v"), py::arg("tau"));
    m.def(
        "tv_value", [](const DArray& img) { return tv_value(to_grid(img)); }, py::arg("img"),
        "Isotropic discrete total variation.");
    m.def(
        "tv_prox",
        [](const DArray& v, double lam, int max_iters, double tol) {
            return from_grid(tv_prox(to_grid(v), lam, max_iters, tol));
        },
        py::arg("v"), py::arg("lam"), py::arg("max_iters") = 20, py::arg("tol") = 1e-4);
    m.def(
        "project_ball",
        [](const DArray& v, double radius) { return from_grid(project_ball(to_grid(v), radius)); },
        py::arg("v"), py::arg("radius"));
    m.def(
        "project_ball_c",
        [](const CArray& v, double radius) { return from_cvec(project_ball(to_cvec(v), radius)); },
        py::arg("v"), py::arg("radius"));

    // operators
    py::class_<CirculantOp>(m, "CirculantOp")
        .def_property_readonly("rows", &CirculantOp::rows)
        .def_property_readonly("cols", &CirculantOp::cols)
        .def("apply", [](const CirculantOp& op, const DArray& x) { return from_grid(op.apply(to_grid(x))); })
        .def("adjoint",
             [](const CirculantOp& op, const DArray& y) { return from_grid(op.adjoint(to_grid(y))); })
        .def("regularized_inverse", [](const CirculantOp& op, double alpha, const DArray& r) {
            return from_grid(op.regularized_inverse(alpha, to_grid(r)));
        });

    py::class_<PartialFourierOp>(m, "PartialFourierOp")
        .def_property_readonly("rows", &PartialFourierOp::rows)
        .def_property_readonly("cols", &PartialFourierOp::cols)
        .def_property_readonly("measurements", &PartialFourierOp::measurements)
        .def_property_readonly("cells", [](const PartialFourierOp& op) { return op.cells(); })
        .def("apply",
             [](const PartialFourierOp& op, const DArray& x) { return from_cvec(op.apply(to_grid(x))); })
        .def("adjoint",
             [](const PartialFourierOp& op, const CArray& y) { return from_grid(op.adjoint(to_cvec(y))); })
        .def("regularized_inverse", [](const PartialFourierOp& op, double alpha, const DArray& r) {
            return from_grid(op.regularized_inverse(alpha, to_grid(r)));
        });

    py::class_<FrameCompositeOp>(m, "FrameCompositeOp")
        .def_property_readonly("rows", &FrameCompositeOp::rows)
        .def_property_readonly("cols", &FrameCompositeOp::cols)
        .def_property_readonly("levels", &FrameCompositeOp::levels)
        .def("apply",
             [](const FrameCompositeOp& op, const DArray& c) { return from_grid(op.apply(to_stack(c))); })
        .def("adjoint",
             [](const FrameCompositeOp& op, const DArray& y) { return from_stack(op.adjoint(to_grid(y))); })
        .def("regularized_inverse", [](const FrameCompositeOp& op, double alpha, const DArray& r) {
            return from_stack(op.regularized_inverse(alpha, to_stack(r)));
        });

    m.def(
        "make_circulant",
        [](const DArray& kernel, int rows, int cols) {
            return make_circulant(to_grid(kernel), rows, cols);
        },
        py::arg("kernel"), py::arg("rows"), py::arg("cols"));
    m.def(
        "make_partial_fourier", [](const BArray& mask) { return make_partial_fourier(to_mask(mask)); },
        py::arg("mask"));
    m.def(
        "make_frame_composite",
        [](const DArray& kernel, int rows, int cols, int levels) {
            return make_frame_composite(make_circulant(to_grid(kernel), rows, cols), levels);
        },
        py::arg("kernel"), py::arg("rows"), py::arg("cols"), py::arg("levels"));

    // solver entry points (one per operator family)
    const char* solve_doc =
        "Solve min phi(x) s.t. ||B x - y|| <= epsilon; returns a dict with the "
        "solution, status, residual and per-iteration trace.";
    auto def_solve = [&](auto tag, auto to_dom, auto from_dom, auto to_obs) {
        using Op = decltype(tag);
        m.def(
            "solve",
            [to_dom, from_dom, to_obs](const Op& op, const py::object& y, const std::string& reg,
                                       double mu, double epsilon, int max_iters, double feas_rtol,
                                       double change_rtol, int tv_inner_iters,
                                       double tv_inner_tol) {
                return solve_impl(op, y,
                                  reg, make_config(mu, epsilon, max_iters, feas_rtol, change_rtol,
                                                   tv_inner_iters, tv_inner_tol),
                                  to_dom, from_dom, to_obs);
            },
            py::arg("op"), py::arg("y"), py::arg("reg") = "l1", py::arg("mu") = 1.0,
            py::arg("epsilon") = 0.0, py::arg("max_iters") = 300, py::arg("feas_rtol") = 1e-3,
            py::arg("change_rtol") = 1e-4, py::arg("tv_inner_iters") = 20,
            py::arg("tv_inner_tol") = 1e-4, solve_doc);
    };
    def_solve(
        CirculantOp(Spectrum2D(1, 1)), [](const DArray& a) { return to_grid(a); },
        [](const Grid2D& g) { return from_grid(g); },
        [](const py::object& y) { return to_grid(y.cast<DArray>()); });
    def_solve(
        PartialFourierOp([] {
            SamplingMask m(1, 1);
            m.set(0, 0);
            return m;
        }()),
        [](const DArray& a) { return to_grid(a); }, [](const Grid2D& g) { return from_grid(g); },
        [](const py::object& y) { return to_cvec(y.cast<CArray>()); });
    def_solve(
        FrameCompositeOp(Spectrum2D(2, 2), 1), [](const DArray& a) { return to_stack(a); },
        [](const CoeffStack& s) { return from_stack(s); },
        [](const py::object& y) { return to_grid(y.cast<DArray>()); });

    // benchmark data
    m.def("shepp_logan", [](int n) { return from_grid(shepp_logan(n)); }, py::arg("n"));
    m.def(
        "synthetic_scene", [](int n) { return from_grid(synthetic_scene(n)); }, py::arg("n"));
    m.def(
        "radial_mask", [](int n, int lines) { return from_mask(radial_mask(n, lines)); },
        py::arg("n"), py::arg("lines"));
    m.def(
        "make_blur_kernel",
        [](const std::string& kind, int size, double std_dev, int halfwidth) {
            BlurSpec spec;
            if (kind == "uniform9")
                spec.kind = BlurKind::Uniform9;
            else if (kind == "gaussian")
                spec.kind = BlurKind::Gaussian;
            else if (kind == "hij")
                spec.kind = BlurKind::Hij;
            else
                throw std::invalid_argument("blur kind must be uniform9|gaussian|hij");
            spec.size = size;
            spec.std_dev = std_dev;
            spec.halfwidth = halfwidth;
            return from_grid(make_blur_kernel(spec));
        },
        py::arg("kind"), py::arg("size") = 9, py::arg("std_dev") = 2.0, py::arg("halfwidth") = 7);
    m.def(
        "add_noise",
        [](const DArray& y, double sigma2, std::uint64_t seed) {
            return from_grid(add_noise(to_grid(y), sigma2, seed));
        },
        py::arg("y"), py::arg("sigma2"), py::arg("seed"));

#ifdef CSALSA_VERSION
    m.attr("__version__") = CSALSA_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
