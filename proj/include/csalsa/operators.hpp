#pragma once

#include "csalsa/fft.hpp"
#include "csalsa/frame.hpp"
#include "csalsa/grid.hpp"

#include <concepts>
#include <vector>

namespace csalsa {

enum class OpKind { Circulant, PartialFourier, FrameComposite };

// Each operator family provides apply, adjoint and the closed-form
// regularized inverse (alpha*B^H*B + I)^{-1} at O(n log n) cost. Operators
// are immutable after construction and safe for concurrent use.

/// Periodic convolution, diagonalized by the unitary DFT.
class CirculantOp {
  public:
    using Domain = Grid2D;
    using Obs = Grid2D;
    static constexpr OpKind kind = OpKind::Circulant;

    CirculantOp(Spectrum2D eigenvalues) : eig_(std::move(eigenvalues)) {}

    int rows() const { return eig_.rows; }
    int cols() const { return eig_.cols; }
    /// Circulant eigenvalues (unnormalized DFT of the centered kernel).
    const Spectrum2D& eigenvalues() const { return eig_; }

    Grid2D apply(const Grid2D& x) const;
    Grid2D adjoint(const Grid2D& y) const;
    Grid2D regularized_inverse(double alpha, const Grid2D& r) const;

  private:
    Spectrum2D eig_;
};

/// Subsampled unitary DFT: y = (U x) restricted to the mask cells, in
/// row-major cell order.
class PartialFourierOp {
  public:
    using Domain = Grid2D;
    using Obs = CVec;
    static constexpr OpKind kind = OpKind::PartialFourier;

    explicit PartialFourierOp(SamplingMask mask);

    int rows() const { return mask_.rows; }
    int cols() const { return mask_.cols; }
    int measurements() const { return int(cells_.size()); }
    const SamplingMask& mask() const { return mask_; }
    const std::vector<int>& cells() const { return cells_; }

    CVec apply(const Grid2D& x) const;
    /// Real-linear adjoint: zero-fill, inverse transform, drop imaginary part.
    Grid2D adjoint(const CVec& y) const;
    Grid2D regularized_inverse(double alpha, const Grid2D& r) const;

    // Complex-domain pair; apply_full(adjoint_full(y)) == y exactly since the
    // selection rows are orthonormal.
    Spectrum2D adjoint_full(const CVec& y) const;
    CVec apply_full(const Spectrum2D& z) const;

  private:
    SamplingMask mask_;
    std::vector<int> cells_;
};

/// Blur composed with Parseval-frame synthesis: acts on frame coefficients,
/// observes a blurred image. The inverse uses the matrix inversion lemma,
/// which needs only the tight-frame identity and the blur's DFT diagonal.
class FrameCompositeOp {
  public:
    using Domain = CoeffStack;
    using Obs = Grid2D;
    static constexpr OpKind kind = OpKind::FrameComposite;

    FrameCompositeOp(Spectrum2D blur_eigenvalues, int levels);

    int rows() const { return eig_.rows; }
    int cols() const { return eig_.cols; }
    int levels() const { return levels_; }
    const Spectrum2D& blur_eigenvalues() const { return eig_; }

    Grid2D apply(const CoeffStack& c) const;
    CoeffStack adjoint(const Grid2D& y) const;
    CoeffStack regularized_inverse(double alpha, const CoeffStack& r) const;

  private:
    Spectrum2D eig_;
    int levels_;
};

template <class Op>
concept linear_operator = requires(const Op& op, const typename Op::Domain& x,
                                   const typename Op::Obs& y, double alpha) {
    { op.apply(x) } -> std::same_as<typename Op::Obs>;
    { op.adjoint(y) } -> std::same_as<typename Op::Domain>;
    { op.regularized_inverse(alpha, x) } -> std::same_as<typename Op::Domain>;
};

/// Build a periodic-convolution operator on a rows x cols grid. The kernel
/// center cell (floor((size-1)/2) per axis) lands on index (0,0), so the blur
/// introduces no translation.
CirculantOp make_circulant(const Grid2D& kernel, int rows, int cols);

/// Selection of DFT cells; requires at least one selected cell.
PartialFourierOp make_partial_fourier(const SamplingMask& mask);

/// Compose a circulant observation with an undecimated-Haar synthesis.
FrameCompositeOp make_frame_composite(const CirculantOp& blur, int levels);

} // namespace csalsa
