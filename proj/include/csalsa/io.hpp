#pragma once

#include "csalsa/grid.hpp"

#include <string>

namespace csalsa {

struct PgmImage {
    Grid2D pixels; // raw sample values
    int maxval = 255;
};

/// Read a P5 (binary, 8- or 16-bit big-endian) or P2 (ascii) grayscale image.
PgmImage read_pgm(const std::string& path);

/// Write a [0,1]-scaled image as 16-bit big-endian binary PGM (values are
/// clamped, then rounded to 0..65535).
void write_pgm16(const std::string& path, const Grid2D& img);

void write_text_file(const std::string& path, const std::string& content);

} // namespace csalsa
