#include "csalsa/frame.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace csalsa;

TEST_CASE("constant image has exactly zero detail and a constant approximation") {
    const double c = 3.25;
    Grid2D img(16, 16, c);
    CoeffStack s = frame_analysis(img, 3);
    REQUIRE(s.planes.size() == 10);
    for (int lev = 0; lev < 3; ++lev)
        for (int d = 0; d < 3; ++d)
            for (double x : s.planes[std::size_t(3) * lev + d].v) CHECK(x == 0.0);
    for (double x : s.planes.back().v) CHECK(x == c); // 2-tap mean of a constant
    Grid2D back = frame_synthesis(s);
    for (double x : back.v) CHECK(x == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("synthesis inverts analysis") {
    oracles::TestRng rng(10);
    Grid2D img = rng.grid(16, 16);
    CHECK(oracles::rel_err(frame_synthesis(frame_analysis(img, 2)).v, img.v) < 1e-10);
}

TEST_CASE("tight-frame identity holds for one to four levels") {
    oracles::TestRng rng(11);
    for (int levels = 1; levels <= 4; ++levels) {
        Grid2D img = rng.grid(64, 64);
        CHECK(oracles::rel_err(frame_synthesis(frame_analysis(img, levels)).v, img.v) < 1e-10);
        // analysis preserves the norm (a consequence of the same identity)
        CHECK(norm2(frame_analysis(img, levels)) == doctest::Approx(norm2(img)).epsilon(1e-12));
    }
}

TEST_CASE("analysis-of-synthesis is a nonexpansive projection on stacks") {
    oracles::TestRng rng(12);
    const CoeffStack shape = frame_analysis(Grid2D(16, 16), 2);
    for (int trial = 0; trial < 10; ++trial) {
        CoeffStack c = rng.stack(shape);
        CoeffStack back = frame_analysis(frame_synthesis(c), 2);
        CHECK(norm2(back) <= norm2(c) * (1.0 + 1e-12));
    }
}

TEST_CASE("frame adjointness: synthesis is the transpose of analysis") {
    oracles::TestRng rng(13);
    const CoeffStack shape = frame_analysis(Grid2D(8, 8), 2);
    for (int trial = 0; trial < 20; ++trial) {
        Grid2D img = rng.grid(8, 8);
        CoeffStack c = rng.stack(shape);
        const double lhs = dot(frame_analysis(img, 2), c);
        const double rhs = dot(img, frame_synthesis(c));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("incompatible dimensions are rejected") {
    CHECK_THROWS_AS(frame_analysis(Grid2D(12, 12), 3), std::invalid_argument); // 12 % 8 != 0
    CHECK_THROWS_AS(frame_analysis(Grid2D(16, 16), 0), std::invalid_argument);
    CHECK_THROWS_AS(frame_synthesis(CoeffStack{}), std::invalid_argument);
}
