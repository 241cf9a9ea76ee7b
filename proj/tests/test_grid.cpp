/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <string>
#include <vector>

#include "doctest.h"
#include "epitrack/error.hpp"
#include "epitrack/format.hpp"
#include "epitrack/grid.hpp"
#include "support.hpp"

using namespace epitrack;

namespace {

std::string header(int ncols, int nrows, const std::string& nodata = "-9999") {
  return "ncols " + std::to_string(ncols) + "\nnrows " + std::to_string(nrows) +
         "\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value " + nodata + "\n";
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("spec validation and geometry") {
    GridSpec g{3, 2, 2.0, 10.0, 20.0};
    CHECK_NOTHROW(g.validate());
    CHECK(g.size() == 6);
    CHECK(g.cell_area() == 4.0);
    CHECK(g.index(1, 2) == 5);
    CHECK(g.row_of(5) == 1);
    CHECK(g.col_of(5) == 2);
    CHECK(g.center_x(0) == 11.0);
    // Row 0 is the northmost row.
    CHECK(g.center_y(0) == 23.0);
    CHECK(g.center_y(1) == 21.0);

    CHECK_THROWS_AS((GridSpec{0, 1, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{1, 0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{1, 1, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{1, 1, -1.0}.validate()), ConfigError);
  }

  TEST_CASE("field construction checks length and finiteness") {
    GridSpec g{2, 2, 1.0};
    CHECK_THROWS_AS(ScalarField(g, {1.0, 2.0, 3.0}), DimensionError);
    CHECK_THROWS_AS(ScalarField(g, {1.0, 2.0, 3.0, std::numeric_limits<double>::quiet_NaN()}), ConfigError);
    CHECK_THROWS_AS(ScalarField(g, {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}), ConfigError);
    ScalarField f(g, {1.0, 2.0, 3.0, 4.0});
    CHECK(f(1, 0) == 3.0);
    CHECK(f.sum() == 10.0);
  }

  TEST_CASE("flatten is row-major") {
    GridSpec g{2, 2, 1.0};
    ScalarField f(g, {1.0, 2.0, 3.0, 4.0});
    f(0, 0) = 11.0;
    f(0, 1) = 12.0;
    f(1, 0) = 21.0;
    f(1, 1) = 22.0;
    const StateVector v = flatten(f);
    CHECK(v.data == std::vector<double>{11.0, 12.0, 21.0, 22.0});
    CHECK(unflatten(v) == f);
  }

  TEST_CASE("unflatten rejects a length mismatch") {
    StateVector v{GridSpec{2, 2, 1.0}, {1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(unflatten(v), DimensionError);
  }

  TEST_CASE("smallest well-formed file") {
    test::TempDir dir("grid");
    const auto p = dir.write("one.asc", header(1, 1) + "5.0\n");
    const AsciiGrid g = read_ascii_grid(p);
    CHECK(g.field.size() == 1);
    CHECK(g.field[0] == 5.0);
    CHECK(g.nodata_count == 0);
  }

  TEST_CASE("nodata cells read as zero and are counted") {
    test::TempDir dir("grid");
    const auto p = dir.write("nd.asc", header(2, 2) + "1 -9999\n3 4\n");
    const AsciiGrid g = read_ascii_grid(p);
    CHECK(g.field(0, 1) == 0.0);
    CHECK(g.field(1, 1) == 4.0);
    CHECK(g.nodata_count == 1);
  }

  TEST_CASE("header keys are case-insensitive and may appear in any order") {
    test::TempDir dir("grid");
    const auto p = dir.write("h.asc",
                             "CELLSIZE 0.5\nNROWS 1\nnodata_value -1\nNCols 2\nYLLCORNER 7\nxllcorner 3\n"
                             "  -1\t2.5  \n\n");
    const AsciiGrid g = read_ascii_grid(p);
    CHECK(g.field.spec().ncols == 2);
    CHECK(g.field.spec().nrows == 1);
    CHECK(g.field.spec().cellsize == 0.5);
    CHECK(g.field.spec().origin_x == 3.0);
    CHECK(g.field.spec().origin_y == 7.0);
    CHECK(g.field[1] == 2.5);
    CHECK(g.nodata_count == 1);
  }

  TEST_CASE("short row is reported with its line number") {
    test::TempDir dir("grid");
    const auto p = dir.write("short.asc", header(3, 2) + "1 2 3\n4 5\n");
    try {
      read_ascii_grid(p);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 8);
      CHECK(std::string(e.what()).find(":8:") != std::string::npos);
    }
  }

  TEST_CASE("malformed files") {
    test::TempDir dir("grid");
    CHECK_THROWS_AS(read_ascii_grid(dir / "missing.asc"), IoError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("a.asc", header(2, 1) + "1 x\n")), ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("b.asc", header(2, 1) + "1 nan\n")), ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("c.asc", header(2, 2) + "1 2\n")), ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("d.asc", header(2, 1) + "1 2\n3 4\n")), ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("e.asc", "ncols 1\nnrows 1\ncellsize 1\n5\n")), ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("f.asc", "ncols 1\nncols 1\nnrows 1\nxllcorner 0\n"
                                                       "yllcorner 0\ncellsize 1\n5\n")),
                    ParseError);
    CHECK_THROWS_AS(read_ascii_grid(dir.write("g.asc", header(0, 1) + "\n")), ParseError);
  }

  TEST_CASE("write then read is bitwise") {
    test::TempDir dir("grid");
    GridSpec g{3, 3, 0.1, -105.5, 31.25};
    ScalarField f(g, {0.0, -1.5, 1.0 / 3.0, 2e-300, 1e300, 0.1, 7.0, 123456.789, -0.0});
    const auto p = dir / "rt.asc";
    write_ascii_grid(f, p);
    const AsciiGrid back = read_ascii_grid(p);
    CHECK(back.nodata_count == 0);
    CHECK(back.field.spec().same_lattice(g));
    CHECK(back.field.spec().origin_x == g.origin_x);
    CHECK(back.field.spec().origin_y == g.origin_y);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(back.field[k] == f[k]);
  }

  TEST_CASE("zero is accepted as 0 or 0.0") {
    test::TempDir dir("grid");
    const AsciiGrid g = read_ascii_grid(dir.write("z.asc", header(2, 1) + "0 0.0\n"));
    CHECK(g.field[0] == 0.0);
    CHECK(g.field[1] == 0.0);
  }
}

TEST_SUITE("format") {
  TEST_CASE("shortest round-trip decimals") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-1.5) == "-1.5");
    CHECK(format_double(0.1) == "0.1");
    for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e-310, 6.02214076e23}) {
      const auto back = parse_double(format_double(v));
      REQUIRE(back.has_value());
      CHECK(*back == v);
    }
  }

  TEST_CASE("parse_double needs the whole token") {
    CHECK(parse_double("+2.5") == 2.5);
    CHECK_FALSE(parse_double("2.5x").has_value());
    CHECK_FALSE(parse_double("").has_value());
    CHECK_FALSE(parse_double("abc").has_value());
  }
}
