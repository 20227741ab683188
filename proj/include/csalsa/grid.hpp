#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace csalsa {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

inline std::size_t checked_extent(int rows, int cols) {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("grid dimensions must be positive");
    return std::size_t(rows) * std::size_t(cols);
}

/// Dense row-major real-valued 2-D array.
struct Grid2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Grid2D() = default;
    Grid2D(int r, int c, double fill = 0.0) : rows(r), cols(c), v(checked_extent(r, c), fill) {}

    double& at(int r, int c) { return v[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return v[std::size_t(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
};

/// Dense row-major complex-valued 2-D array (Fourier domain and complex images).
struct Spectrum2D {
    int rows = 0;
    int cols = 0;
    CVec v;

    Spectrum2D() = default;
    Spectrum2D(int r, int c, Complex fill = {}) : rows(r), cols(c), v(checked_extent(r, c), fill) {}

    Complex& at(int r, int c) { return v[std::size_t(r) * cols + c]; }
    const Complex& at(int r, int c) const { return v[std::size_t(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
};

/// Undecimated wavelet coefficient planes: 3*levels detail planes ordered
/// finest level first as {horizontal, vertical, diagonal}, approximation last.
/// All planes share the image dimensions, so the stack is (3L+1)x redundant.
struct CoeffStack {
    int levels = 0;
    std::vector<Grid2D> planes;

    int rows() const { return planes.empty() ? 0 : planes.front().rows; }
    int cols() const { return planes.empty() ? 0 : planes.front().cols; }
    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& p : planes) n += p.size();
        return n;
    }
};

/// Boolean spectrum-cell selector; `selected` is row-major over DFT layout.
struct SamplingMask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> selected;

    SamplingMask() = default;
    SamplingMask(int r, int c) : rows(r), cols(c), selected(checked_extent(r, c), 0) {}

    bool at(int r, int c) const { return selected[std::size_t(r) * cols + c] != 0; }
    void set(int r, int c, bool on = true) { selected[std::size_t(r) * cols + c] = on ? 1 : 0; }
    int count() const {
        int m = 0;
        for (auto s : selected) m += (s != 0);
        return m;
    }
};

// ---- vector-space helpers -------------------------------------------------
//
// Compensated (Kahan) accumulation keeps norms/dots accurate to a few ulp
// independent of length; the ball-projection contract relies on that.

namespace detail {

class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace detail

inline double norm2(const std::vector<double>& a) {
    detail::KahanSum s;
    for (double x : a) s.add(x * x);
    return std::sqrt(s.value());
}

inline double norm2(const Grid2D& a) { return norm2(a.v); }

inline double norm2(const CVec& a) {
    detail::KahanSum s;
    for (const auto& z : a) {
        s.add(z.real() * z.real());
        s.add(z.imag() * z.imag());
    }
    return std::sqrt(s.value());
}

inline double norm2(const Spectrum2D& a) { return norm2(a.v); }

inline double norm2(const CoeffStack& a) {
    detail::KahanSum s;
    for (const auto& p : a.planes)
        for (double x : p.v) s.add(x * x);
    return std::sqrt(s.value());
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    detail::KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double dot(const Grid2D& a, const Grid2D& b) { return dot(a.v, b.v); }

inline double dot(const CoeffStack& a, const CoeffStack& b) {
    detail::KahanSum s;
    for (std::size_t p = 0; p < a.planes.size(); ++p)
        for (std::size_t i = 0; i < a.planes[p].v.size(); ++i)
            s.add(a.planes[p].v[i] * b.planes[p].v[i]);
    return s.value();
}

/// Real inner product on C^m viewed as R^{2m}.
inline double dot_real(const CVec& a, const CVec& b) {
    detail::KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.add(a[i].real() * b[i].real());
        s.add(a[i].imag() * b[i].imag());
    }
    return s.value();
}

// elementwise a+b / a-b, value-returning

inline std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Grid2D add(const Grid2D& a, const Grid2D& b) {
    Grid2D r(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) r.v[i] = a.v[i] + b.v[i];
    return r;
}

inline Grid2D sub(const Grid2D& a, const Grid2D& b) {
    Grid2D r(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
}

inline CVec add(const CVec& a, const CVec& b) {
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline CVec sub(const CVec& a, const CVec& b) {
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline CoeffStack add(const CoeffStack& a, const CoeffStack& b) {
    CoeffStack r = a;
    for (std::size_t p = 0; p < r.planes.size(); ++p)
        for (std::size_t i = 0; i < r.planes[p].v.size(); ++i) r.planes[p].v[i] += b.planes[p].v[i];
    return r;
}

inline CoeffStack sub(const CoeffStack& a, const CoeffStack& b) {
    CoeffStack r = a;
    for (std::size_t p = 0; p < r.planes.size(); ++p)
        for (std::size_t i = 0; i < r.planes[p].v.size(); ++i) r.planes[p].v[i] -= b.planes[p].v[i];
    return r;
}

// in-place updates

inline void add_in(std::vector<double>& dst, const std::vector<double>& a) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a[i];
}
inline void sub_in(std::vector<double>& dst, const std::vector<double>& a) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= a[i];
}
inline void scale_in(std::vector<double>& dst, double s) {
    for (auto& x : dst) x *= s;
}

inline void add_in(Grid2D& dst, const Grid2D& a) { add_in(dst.v, a.v); }
inline void sub_in(Grid2D& dst, const Grid2D& a) { sub_in(dst.v, a.v); }
inline void scale_in(Grid2D& dst, double s) { scale_in(dst.v, s); }

inline void add_in(CVec& dst, const CVec& a) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a[i];
}
inline void sub_in(CVec& dst, const CVec& a) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= a[i];
}
inline void scale_in(CVec& dst, double s) {
    for (auto& z : dst) z *= s;
}

inline void add_in(CoeffStack& dst, const CoeffStack& a) {
    for (std::size_t p = 0; p < dst.planes.size(); ++p) add_in(dst.planes[p], a.planes[p]);
}
inline void sub_in(CoeffStack& dst, const CoeffStack& a) {
    for (std::size_t p = 0; p < dst.planes.size(); ++p) sub_in(dst.planes[p], a.planes[p]);
}
inline void scale_in(CoeffStack& dst, double s) {
    for (auto& p : dst.planes) scale_in(p, s);
}

inline Grid2D zeros_like(const Grid2D& a) { return Grid2D(a.rows, a.cols); }
inline CVec zeros_like(const CVec& a) { return CVec(a.size()); }
inline CoeffStack zeros_like(const CoeffStack& a) {
    CoeffStack r;
    r.levels = a.levels;
    r.planes.reserve(a.planes.size());
    for (const auto& p : a.planes) r.planes.emplace_back(p.rows, p.cols);
    return r;
}

inline bool is_finite(const std::vector<double>& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}
inline bool is_finite(const Grid2D& a) { return is_finite(a.v); }
inline bool is_finite(const CVec& a) {
    for (const auto& z : a)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}
inline bool is_finite(const CoeffStack& a) {
    for (const auto& p : a.planes)
        if (!is_finite(p)) return false;
    return true;
}

} // namespace csalsa
