#include "csalsa/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace csalsa {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

void check_shape(int ar, int ac, int br, int bc, const char* what) {
    if (ar != br || ac != bc) throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

} // namespace

// ---- CirculantOp -----------------------------------------------------------

Grid2D CirculantOp::apply(const Grid2D& x) const {
    check_shape(x.rows, x.cols, eig_.rows, eig_.cols, "circulant apply");
    Spectrum2D s = fft2_unitary(x);
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] *= eig_.v[i];
    return ifft2_unitary_real(s);
}

Grid2D CirculantOp::adjoint(const Grid2D& y) const {
    check_shape(y.rows, y.cols, eig_.rows, eig_.cols, "circulant adjoint");
    Spectrum2D s = fft2_unitary(y);
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] *= std::conj(eig_.v[i]);
    return ifft2_unitary_real(s);
}

Grid2D CirculantOp::regularized_inverse(double alpha, const Grid2D& r) const {
    check_alpha(alpha);
    check_shape(r.rows, r.cols, eig_.rows, eig_.cols, "circulant inverse");
    Spectrum2D s = fft2_unitary(r);
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] /= (alpha * std::norm(eig_.v[i]) + 1.0);
    return ifft2_unitary_real(s);
}

CirculantOp make_circulant(const Grid2D& kernel, int rows, int cols) {
    if (kernel.rows > rows || kernel.cols > cols)
        throw std::invalid_argument("kernel larger than target grid");
    checked_extent(rows, cols);

    // Zero-embed with the kernel center at (0,0), circularly.
    const int cr = (kernel.rows - 1) / 2;
    const int cc = (kernel.cols - 1) / 2;
    Grid2D embedded(rows, cols, 0.0);
    for (int r = 0; r < kernel.rows; ++r) {
        const int rr = ((r - cr) % rows + rows) % rows;
        for (int c = 0; c < kernel.cols; ++c) {
            const int ccd = ((c - cc) % cols + cols) % cols;
            embedded.at(rr, ccd) += kernel.at(r, c);
        }
    }
    // Circulant eigenvalues are the unnormalized DFT of the point response.
    Spectrum2D eig = fft2_unitary(embedded);
    const double scale = std::sqrt(double(rows) * double(cols));
    for (auto& z : eig.v) z *= scale;
    return CirculantOp(std::move(eig));
}

// ---- PartialFourierOp ------------------------------------------------------

PartialFourierOp::PartialFourierOp(SamplingMask mask) : mask_(std::move(mask)) {
    checked_extent(mask_.rows, mask_.cols);
    for (std::size_t i = 0; i < mask_.selected.size(); ++i)
        if (mask_.selected[i]) cells_.push_back(int(i));
    if (cells_.empty()) throw std::invalid_argument("sampling mask selects no cells");
}

CVec PartialFourierOp::apply(const Grid2D& x) const {
    check_shape(x.rows, x.cols, mask_.rows, mask_.cols, "partial Fourier apply");
    Spectrum2D s = fft2_unitary(x);
    CVec y(cells_.size());
    for (std::size_t j = 0; j < cells_.size(); ++j) y[j] = s.v[cells_[j]];
    return y;
}

CVec PartialFourierOp::apply_full(const Spectrum2D& z) const {
    check_shape(z.rows, z.cols, mask_.rows, mask_.cols, "partial Fourier apply");
    Spectrum2D s = fft2_unitary(z);
    CVec y(cells_.size());
    for (std::size_t j = 0; j < cells_.size(); ++j) y[j] = s.v[cells_[j]];
    return y;
}

Spectrum2D PartialFourierOp::adjoint_full(const CVec& y) const {
    if (y.size() != cells_.size())
        throw std::invalid_argument("shape mismatch: partial Fourier adjoint");
    Spectrum2D s(mask_.rows, mask_.cols);
    for (std::size_t j = 0; j < cells_.size(); ++j) s.v[cells_[j]] = y[j];
    return ifft2_unitary(s);
}

Grid2D PartialFourierOp::adjoint(const CVec& y) const {
    Spectrum2D z = adjoint_full(y);
    Grid2D out(z.rows, z.cols);
    for (std::size_t i = 0; i < z.v.size(); ++i) out.v[i] = z.v[i].real();
    return out;
}

Grid2D PartialFourierOp::regularized_inverse(double alpha, const Grid2D& r) const {
    check_alpha(alpha);
    check_shape(r.rows, r.cols, mask_.rows, mask_.cols, "partial Fourier inverse");
    // (alpha*B^H*B + I)^{-1} = I - alpha/(1+alpha) * U^H P U with P the cell
    // selector, i.e. selected spectrum cells shrink by 1/(1+alpha).
    Spectrum2D s = fft2_unitary(r);
    const double shrink = 1.0 / (1.0 + alpha);
    for (int cell : cells_) s.v[cell] *= shrink;
    return ifft2_unitary_real(s);
}

PartialFourierOp make_partial_fourier(const SamplingMask& mask) { return PartialFourierOp(mask); }

// ---- FrameCompositeOp ------------------------------------------------------

FrameCompositeOp::FrameCompositeOp(Spectrum2D blur_eigenvalues, int levels)
    : eig_(std::move(blur_eigenvalues)), levels_(levels) {
    if (levels < 1) throw std::invalid_argument("frame levels must be >= 1");
    const int mult = 1 << levels;
    if (eig_.rows % mult != 0 || eig_.cols % mult != 0)
        throw std::invalid_argument("image dimensions must be divisible by 2^levels");
}

Grid2D FrameCompositeOp::apply(const CoeffStack& c) const {
    Grid2D img = frame_synthesis(c);
    check_shape(img.rows, img.cols, eig_.rows, eig_.cols, "frame composite apply");
    Spectrum2D s = fft2_unitary(img);
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] *= eig_.v[i];
    return ifft2_unitary_real(s);
}

CoeffStack FrameCompositeOp::adjoint(const Grid2D& y) const {
    check_shape(y.rows, y.cols, eig_.rows, eig_.cols, "frame composite adjoint");
    Spectrum2D s = fft2_unitary(y);
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] *= std::conj(eig_.v[i]);
    return frame_analysis(ifft2_unitary_real(s), levels_);
}

CoeffStack FrameCompositeOp::regularized_inverse(double alpha, const CoeffStack& r) const {
    check_alpha(alpha);
    if (r.levels != levels_ || r.planes.size() != std::size_t(3) * levels_ + 1)
        throw std::invalid_argument("shape mismatch: frame composite inverse");
    // Matrix inversion lemma with W W^H = I:
    //   (alpha*W^H A^H A W + I)^{-1} r = r - W^H [A^H (A A^H + I/alpha)^{-1} A] W r,
    // and the bracket is diagonal in the Fourier basis with entries
    // |d|^2 / (|d|^2 + 1/alpha).
    Grid2D img = frame_synthesis(r);
    Spectrum2D s = fft2_unitary(img);
    const double inv_alpha = 1.0 / alpha;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        const double d2 = std::norm(eig_.v[i]);
        s.v[i] *= d2 / (d2 + inv_alpha);
    }
    CoeffStack correction = frame_analysis(ifft2_unitary_real(s), levels_);
    CoeffStack out = r;
    sub_in(out, correction);
    return out;
}

FrameCompositeOp make_frame_composite(const CirculantOp& blur, int levels) {
    return FrameCompositeOp(blur.eigenvalues(), levels);
}

} // namespace csalsa
