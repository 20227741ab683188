#include "csalsa/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csalsa {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (!std::isspace(ch)) {
            tok.push_back(char(ch));
            while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#')
                tok.push_back(char(in.get()));
            return tok;
        }
    }
    throw std::runtime_error("unexpected end of PGM header");
}

} // namespace

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file: " + path);

    const std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2")
        throw std::runtime_error("unsupported image format (want P5 or P2 PGM): " + path);
    const int cols = std::stoi(next_token(in));
    const int rows = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (rows <= 0 || cols <= 0 || maxval <= 0 || maxval > 65535)
        throw std::runtime_error("invalid PGM header in " + path);

    PgmImage img;
    img.maxval = maxval;
    img.pixels = Grid2D(rows, cols);

    if (magic == "P2") {
        for (auto& px : img.pixels.v) px = double(std::stoi(next_token(in)));
        return img;
    }

    in.get(); // single whitespace after maxval
    const bool wide = maxval > 255;
    std::vector<unsigned char> raw(img.pixels.size() * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (std::size_t(in.gcount()) != raw.size())
        throw std::runtime_error("truncated PGM data in " + path);
    if (wide) {
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels.v[i] = double((unsigned(raw[2 * i]) << 8) | unsigned(raw[2 * i + 1]));
    } else {
        for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels.v[i] = double(raw[i]);
    }
    return img;
}

void write_pgm16(const std::string& path, const Grid2D& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open image file for writing: " + path);
    out << "P5\n" << img.cols << " " << img.rows << "\n65535\n";
    std::vector<unsigned char> raw(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        double x = img.v[i];
        x = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
        const auto q = std::uint16_t(std::lround(x * 65535.0));
        raw[2 * i] = (unsigned char)(q >> 8); // big-endian
        raw[2 * i + 1] = (unsigned char)(q & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
    if (!out) throw std::runtime_error("failed writing image: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

} // namespace csalsa
