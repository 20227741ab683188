#include "csalsa/solver.hpp"

#include <cstdio>
#include <stdexcept>

namespace csalsa {

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open trace file for writing: " + path);
    std::fputs("iter,res_w,res_u,phi_w,gap_uw,mse,elapsed_ms\n", f);
    for (const auto& r : trace.records)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.res_w, r.res_u,
                     r.phi_w, r.gap_uw, r.mse, r.elapsed_ms);
    std::fclose(f);
}

} // namespace csalsa
