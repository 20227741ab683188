#include "csalsa/frame.hpp"

#include <stdexcept>

namespace csalsa {

namespace {

struct Split {
    Grid2D ll, dh, dv, dd;
};

// One a-trous level with hole step s: separable 2-tap Haar pair
// (x[i]+x[i+s])/2, (x[i]-x[i+s])/2, columns then rows, circular indexing.
Split split_level(const Grid2D& a, int step) {
    const int R = a.rows, C = a.cols;
    Grid2D tl(R, C), th(R, C);
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            const int cs = (c + step) % C;
            const double x0 = a.at(r, c), x1 = a.at(r, cs);
            tl.at(r, c) = 0.5 * (x0 + x1);
            th.at(r, c) = 0.5 * (x0 - x1);
        }
    }
    Split out{Grid2D(R, C), Grid2D(R, C), Grid2D(R, C), Grid2D(R, C)};
    for (int r = 0; r < R; ++r) {
        const int rs = (r + step) % R;
        for (int c = 0; c < C; ++c) {
            out.ll.at(r, c) = 0.5 * (tl.at(r, c) + tl.at(rs, c));
            out.dv.at(r, c) = 0.5 * (tl.at(r, c) - tl.at(rs, c));
            out.dh.at(r, c) = 0.5 * (th.at(r, c) + th.at(rs, c));
            out.dd.at(r, c) = 0.5 * (th.at(r, c) - th.at(rs, c));
        }
    }
    return out;
}

// Exact adjoint of split_level.
Grid2D merge_level(const Grid2D& ll, const Grid2D& dh, const Grid2D& dv, const Grid2D& dd,
                   int step) {
    const int R = ll.rows, C = ll.cols;
    Grid2D tl(R, C), th(R, C);
    for (int r = 0; r < R; ++r) {
        const int rp = (r - step % R + R) % R;
        for (int c = 0; c < C; ++c) {
            tl.at(r, c) = 0.5 * (ll.at(r, c) + ll.at(rp, c) + dv.at(r, c) - dv.at(rp, c));
            th.at(r, c) = 0.5 * (dh.at(r, c) + dh.at(rp, c) + dd.at(r, c) - dd.at(rp, c));
        }
    }
    Grid2D a(R, C);
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            const int cp = (c - step % C + C) % C;
            a.at(r, c) = 0.5 * (tl.at(r, c) + tl.at(r, cp) + th.at(r, c) - th.at(r, cp));
        }
    }
    return a;
}

void check_dims(int rows, int cols, int levels) {
    if (levels < 1) throw std::invalid_argument("frame levels must be >= 1");
    const int mult = 1 << levels;
    if (rows % mult != 0 || cols % mult != 0)
        throw std::invalid_argument("image dimensions must be divisible by 2^levels");
}

} // namespace

CoeffStack frame_analysis(const Grid2D& img, int levels) {
    check_dims(img.rows, img.cols, levels);
    CoeffStack out;
    out.levels = levels;
    out.planes.reserve(std::size_t(3) * levels + 1);
    Grid2D approx = img;
    for (int lev = 0; lev < levels; ++lev) {
        Split s = split_level(approx, 1 << lev);
        out.planes.push_back(std::move(s.dh));
        out.planes.push_back(std::move(s.dv));
        out.planes.push_back(std::move(s.dd));
        approx = std::move(s.ll);
    }
    out.planes.push_back(std::move(approx));
    return out;
}

Grid2D frame_synthesis(const CoeffStack& coeffs) {
    const int L = coeffs.levels;
    if (L < 1 || coeffs.planes.size() != std::size_t(3) * L + 1)
        throw std::invalid_argument("coefficient stack must hold 3*levels + 1 planes");
    Grid2D a = coeffs.planes.back();
    for (int lev = L - 1; lev >= 0; --lev) {
        const auto& dh = coeffs.planes[std::size_t(3) * lev + 0];
        const auto& dv = coeffs.planes[std::size_t(3) * lev + 1];
        const auto& dd = coeffs.planes[std::size_t(3) * lev + 2];
        a = merge_level(a, dh, dv, dd, 1 << lev);
    }
    return a;
}

} // namespace csalsa
