#include "csalsa/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace csalsa {

namespace {

struct PlanKey {
    int rows;
    int cols;
    int sign;
    bool operator==(const PlanKey& o) const {
        return rows == o.rows && cols == o.cols && sign == o.sign;
    }
};

struct PlanKeyHash {
    std::size_t operator()(const PlanKey& k) const {
        return (std::size_t(k.rows) * 73856093u) ^ (std::size_t(k.cols) * 19349663u) ^
               std::size_t(k.sign & 3);
    }
};

// Plans are created once per (rows, cols, direction) under a lock and then
// reused via the new-array execute interface, which is safe to call
// concurrently. FFTW_ESTIMATE keeps planning deterministic and leaves the
// planning buffers untouched; FFTW_UNALIGNED lets us execute on any caller
// buffer.
struct PlanCache {
    std::mutex mutex;
    std::unordered_map<PlanKey, fftw_plan, PlanKeyHash> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
        fftw_cleanup();
    }
};

fftw_plan get_plan(int rows, int cols, int sign) {
    static PlanCache cache;

    std::lock_guard<std::mutex> lock(cache.mutex);
    PlanKey key{rows, cols, sign};
    auto it = cache.plans.find(key);
    if (it != cache.plans.end()) return it->second;

    std::vector<Complex> in(std::size_t(rows) * cols), out(std::size_t(rows) * cols);
    fftw_plan p = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans.emplace(key, p);
    return p;
}

Spectrum2D transform(const Spectrum2D& in, int sign) {
    Spectrum2D out(in.rows, in.cols);
    fftw_plan plan = get_plan(in.rows, in.cols, sign);
    // execute does not modify the input array for out-of-place c2c plans
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.v.data())),
                     reinterpret_cast<fftw_complex*>(out.v.data()));
    const double scale = 1.0 / std::sqrt(double(in.rows) * double(in.cols));
    for (auto& z : out.v) z *= scale;
    return out;
}

} // namespace

Spectrum2D fft2_unitary(const Grid2D& g) {
    Spectrum2D tmp(g.rows, g.cols);
    for (std::size_t i = 0; i < g.v.size(); ++i) tmp.v[i] = Complex(g.v[i], 0.0);
    return transform(tmp, FFTW_FORWARD);
}

Spectrum2D fft2_unitary(const Spectrum2D& g) { return transform(g, FFTW_FORWARD); }

Spectrum2D ifft2_unitary(const Spectrum2D& s) { return transform(s, FFTW_BACKWARD); }

Grid2D ifft2_unitary_real(const Spectrum2D& s) {
    Spectrum2D z = transform(s, FFTW_BACKWARD);
    Grid2D out(s.rows, s.cols);
    for (std::size_t i = 0; i < z.v.size(); ++i) out.v[i] = z.v[i].real();
    return out;
}

} // namespace csalsa
