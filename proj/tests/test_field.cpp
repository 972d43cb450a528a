#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csn/field.hpp"
#include "csn/parser.hpp"
#include "doctest.h"

using namespace csn;

TEST_CASE("constant fields read the same everywhere, any arity") {
    FieldSpec f = parse_field_spec("constant [21.5, -3, 0.25]");
    CHECK(f.arity() == 3);
    std::vector<double> want{21.5, -3, 0.25};
    CHECK(field_at(f, Pos{0, 0}) == want);
    CHECK(field_at(f, Pos{-1e6, 1e6}) == want);
}

TEST_CASE("analytic fields evaluate exactly and sum their terms") {
    FieldSpec lin = parse_field_spec("analytic linear(2, -1, 0.5)");
    CHECK(field_at(lin, Pos{3, 4})[0] == doctest::Approx(2 * 3 + -1 * 4 + 0.5));

    FieldSpec gauss = parse_field_spec("analytic gaussian(1, 2, 80, 3)");
    CHECK(field_at(gauss, Pos{1, 2})[0] == doctest::Approx(80.0));  // peak at the center
    double off = field_at(gauss, Pos{4, 2})[0];
    CHECK(off == doctest::Approx(80.0 * std::exp(-9.0 / 18.0)));
    CHECK(field_at(gauss, Pos{-2, 2})[0] == doctest::Approx(off));  // symmetric

    FieldSpec rad = parse_field_spec("analytic radial(0, 0, 2)");
    CHECK(field_at(rad, Pos{0, 0})[0] == doctest::Approx(0.0));
    CHECK(field_at(rad, Pos{3, 4})[0] == doctest::Approx(10.0));

    FieldSpec sum = parse_field_spec("analytic linear(1, 0, 0) + radial(0, 0, 1)");
    CHECK(sum.arity() == 1);
    CHECK(field_at(sum, Pos{3, 4})[0] == doctest::Approx(3.0 + 5.0));
}

TEST_CASE("grid fields look up the containing cell, clamped at the borders") {
    FieldSpec f = parse_field_spec(
        "grid origin = (-2, -2) cell = 1 file = \"fields/readings.grid\"", CSN_CORPUS_DIR);
    CHECK(f.arity() == 1);

    // oracle scan over interior sample points: value at (row, col) is
    // 10*row + col + 0.5, sampled away from cell boundaries
    for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 5; ++col) {
            Pos at{-2 + col + 0.3, -2 + row + 0.7};
            CAPTURE(row);
            CAPTURE(col);
            CHECK(field_at(f, at)[0] == doctest::Approx(10.0 * row + col + 0.5));
        }
    }

    // outside the grid the border cell answers
    CHECK(field_at(f, Pos{-100, -100})[0] == doctest::Approx(0.5));
    CHECK(field_at(f, Pos{100, 100})[0] == doctest::Approx(44.5));
    CHECK(field_at(f, Pos{100, -100})[0] == doctest::Approx(4.5));
    CHECK(field_at(f, Pos{-100, 100})[0] == doctest::Approx(40.5));
}

TEST_CASE("fields are total: a million positions all yield finite readings") {
    FieldSpec grid = parse_field_spec(
        "grid origin = (-2, -2) cell = 1 file = \"fields/readings.grid\"", CSN_CORPUS_DIR);
    FieldSpec analytic =
        parse_field_spec("analytic gaussian(0, 0, 50, 2) + linear(1, -1, 3) + radial(5, 5, 0.5)");

    for (const FieldSpec* f : {&grid, &analytic}) {
        std::size_t arity = f->arity();
        bool all_good = true;
        for (int ix = 0; ix < 1000 && all_good; ++ix) {
            for (int iy = 0; iy < 1000; ++iy) {
                Pos at{-50.0 + ix * 0.1, -50.0 + iy * 0.1};
                std::vector<double> v = field_at(*f, at);
                if (v.size() != arity || !std::all_of(v.begin(), v.end(), [](double d) {
                        return std::isfinite(d);
                    })) {
                    CAPTURE(at.x);
                    CAPTURE(at.y);
                    all_good = false;
                    break;
                }
            }
        }
        CHECK(all_good);
    }
}

TEST_CASE("broadcast range is strict and uses the sender's radius only") {
    Sensor a;
    a.position = Pos{0, 0};
    a.radius = 5;
    Sensor b;
    b.position = Pos{3, 4};  // distance exactly 5
    b.radius = 100;

    CHECK(!in_range(a, b));  // d == radius: out, the predicate is strict
    CHECK(in_range(b, a));   // b's own radius is what matters for b's sends

    a.radius = 5.0001;
    CHECK(in_range(a, b));

    a.radius = 0;
    CHECK(!in_range(a, a));  // a sensor is never in range of itself at radius 0
}

TEST_CASE("grid declarations validate their inputs") {
    CHECK_THROWS_AS(parse_field_spec("grid origin = (0, 0) cell = 0 file = \"x\""), ParseError);
    CHECK_THROWS_AS(parse_field_spec("grid origin = (0, 0) cell = 1 file = \"no/such.grid\""),
                    ParseError);
    CHECK_THROWS_AS(parse_field_spec("analytic gaussian(1, 2)"), ParseError);
    CHECK_THROWS_AS(parse_field_spec("mystery [1]"), ParseError);
}
