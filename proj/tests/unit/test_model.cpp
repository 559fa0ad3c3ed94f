#include <stdexcept>
#include <cmath>

#include "bargzero/model.hpp"
#include "doctest.h"

using namespace bargzero;

TEST_CASE("grid is endpoint-inclusive and mirror-exact") {
  for (std::size_t n : {3u, 4u, 512u, 1024u, 1025u, 4096u}) {
    const auto g = make_grid(8.0, n);
    CHECK(g.points.size() == n);
    CHECK(g.spacing == doctest::Approx(16.0 / static_cast<double>(n - 1)).epsilon(1e-15));
    CHECK(g.points.front() == -8.0);
    CHECK(g.points.back() == 8.0);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(-g.points[g.mirror(i)] == g.points[i]);
    }
    for (std::size_t i = 1; i < n; ++i) CHECK(g.points[i] - g.points[i - 1] == doctest::Approx(g.spacing));
  }
}

TEST_CASE("odd grids contain the origin exactly") {
  const auto g = make_grid(8.0, 1025);
  CHECK(g.points[512] == 0.0);
}

TEST_CASE("grid rejects degenerate input") {
  CHECK_THROWS_AS(make_grid(0.0, 1024), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 1024), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8.0, 2), std::invalid_argument);
}

TEST_CASE("potential values") {
  CHECK(Potential::harmonic()(1.0) == doctest::Approx(0.5));
  CHECK(Potential::anharmonic(0.1)(1.0) == doctest::Approx(0.6));
  CHECK(Potential::anharmonic(0.5)(2.0) == doctest::Approx(2.0 + 8.0));
  const auto dw = Potential::double_well(1.5);
  CHECK(dw(0.0) == doctest::Approx(std::pow(1.5, 4) / 4.0));
  CHECK(dw(1.5) == 0.0);
  CHECK(dw(-1.5) == 0.0);
  CHECK(dw.barrier() == 1.5);
  CHECK_THROWS_AS(Potential::harmonic().barrier(), std::logic_error);
  for (double x : {0.3, 1.1, 2.7}) {
    CHECK(dw(x) == dw(-x));
    CHECK(Potential::anharmonic(0.1)(x) == Potential::anharmonic(0.1)(-x));
  }
}

TEST_CASE("potential constructors validate parameters") {
  CHECK_THROWS_AS(Potential::anharmonic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Potential::anharmonic(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Potential::double_well(0.0), std::invalid_argument);
}

TEST_CASE("potential text round trip") {
  for (const char* s : {"harmonic", "anharmonic:0.1", "anharmonic:0.5", "dw:1.5", "dw:2", "dw:0.59473684210526312"}) {
    const auto p = parse_potential(s);
    CHECK(parse_potential(to_string(p)) == p);
  }
  CHECK(parse_potential("dw:1.5").kind() == PotentialKind::DoubleWell);
  CHECK(parse_potential("dw:1.5").parameter() == 1.5);
  CHECK(to_string(parse_potential("anharmonic:0.1")) == "anharmonic:0.1");
  CHECK(file_label(Potential::double_well(1.5)) == "dw_1.5");
  for (const char* bad : {"", "quartic", "dw:", "dw:x", "dw:-1", "anharmonic", "harmonic:1", "dw:1.5x"})
    CHECK_THROWS_AS(parse_potential(bad), std::invalid_argument);
}

TEST_CASE("vectorised potential matches scalar") {
  const auto g = make_grid(8.0, 64);
  const auto p = Potential::double_well(1.0);
  const auto v = eval_potential(p, g.points);
  for (std::size_t i = 0; i < g.points.size(); ++i) CHECK(v[i] == p(g.points[i]));
}
