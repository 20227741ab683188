#pragma once

#include "csalsa/bench.hpp"

#include <string>

namespace csalsa::cli {

struct OutputPaths {
    std::string image;
    std::string trace;
    std::string report;
};

struct RunConfig {
    ExperimentSpec spec;
    OutputPaths outputs;
};

/// Parse "synthetic", "synthetic:N" or a file path.
ImageSource parse_image_source(const std::string& text);

/// Strict JSON config: unknown keys are rejected by name so typos fail
/// loudly instead of being absorbed by defaults.
RunConfig parse_run_config(const std::string& path);

} // namespace csalsa::cli
