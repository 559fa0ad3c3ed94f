#include <stdexcept>
#include <algorithm>
#include <cmath>

#include "bargzero/analysis.hpp"
#include "bargzero/errors.hpp"
#include "bargzero/fdsolve.hpp"
#include "doctest.h"

using namespace bargzero;

namespace {

ZeroSet make_set(std::vector<Complex> zs) {
  ZeroSet s;
  s.zeros = std::move(zs);
  s.residuals.assign(s.zeros.size(), 0.0);
  sort_zeros(s);
  return s;
}

}  // namespace

TEST_CASE("zero classification") {
  CHECK(classify_zero({0, 1.6143}).label == ZeroLabel::ImagAxis);
  CHECK(classify_zero({3.9, 0.7}).label == ZeroLabel::QuartetMember);
  CHECK(classify_zero({0, 0}).label == ZeroLabel::Origin);
  CHECK(classify_zero({2.0, 1e-9}).label == ZeroLabel::RealAxis);
  CHECK(classify_zero({5e-7, 5e-7}).label == ZeroLabel::Origin);
  CHECK(classify_zero({2e-6, 3.0}, 1e-6).label == ZeroLabel::QuartetMember);
  CHECK(classify_zero({2e-6, 3.0}, 1e-5).label == ZeroLabel::ImagAxis);
  CHECK(to_string(ZeroLabel::ImagAxis) == "ImagAxis");
  CHECK(to_string(ZeroLabel::QuartetMember) == "QuartetMember");
}

TEST_CASE("labels only change inside the widened annulus") {
  for (double re : {0.0, 3e-7, 4e-6, 2e-5, 0.3}) {
    for (double im : {0.0, 3e-7, 4e-6, 2e-5, 1.1}) {
      const auto a = classify_zero({re, im}, 1e-6).label;
      const auto b = classify_zero({re, im}, 1e-5).label;
      if (a != b) {
        const bool near_axis = std::abs(re) < 1e-5 || std::abs(im) < 1e-5;
        CHECK(near_axis);
      }
    }
  }
}

TEST_CASE("w map") {
  auto w = w_map(make_set({{0, 1.6143}, {0, -1.6143}}));
  REQUIRE(w.size() == 1);
  CHECK(w[0].real() == doctest::Approx(-2.606).epsilon(1e-4));
  CHECK(std::abs(w[0].imag()) < 1e-12);
  w = w_map(make_set({{1, 0}, {-1, 0}}));
  REQUIRE(w.size() == 1);
  CHECK(std::abs(w[0] - Complex(1, 0)) < 1e-15);
  w = w_map(make_set({{0, 0}, {0, 2.4}, {0, -2.4}}));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Complex(0, 0));
  CHECK(w[1].real() == doctest::Approx(-5.76));
  CHECK_THROWS_AS(w_map(make_set({{1, 0}, {0, 2}, {0, -2}})), PairingFailure);
}

TEST_CASE("zero drift") {
  const auto a = make_set({{0, 1}, {0, -1}, {3, 1}, {3, -1}, {-3, 1}, {-3, -1}});
  auto d = zero_drift(a, a);
  REQUIRE(d);
  CHECK(d->mean == 0.0);
  CHECK(d->max == 0.0);
  CHECK(d->matched == 6);
  CHECK_FALSE(d->ambiguous);
  ZeroSet b = a;
  for (auto& z : b.zeros) z += 1e-3;
  d = zero_drift(a, b);
  REQUIRE(d);
  CHECK(d->mean == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(d->max == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(zero_drift(a, a, 2)->matched == 2);
  CHECK_FALSE(zero_drift(a, ZeroSet{}));
  CHECK_FALSE(zero_drift(ZeroSet{}, a));
  ZeroSet far = a;
  for (auto& z : far.zeros) z += 5.0;
  CHECK(zero_drift(a, far)->ambiguous);
}

TEST_CASE("truncation drift on the double-well ground state") {
  const auto g = make_grid(8.0, 1024);
  const auto e = solve_lowest(g, Potential::double_well(1.5), 1);
  const auto rows = truncation_ablation(g, {e[0].psi}, {20, 30, 200});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean <= 1e-12);
  CHECK(rows[1].mean <= 1e-12);
  CHECK(rows[1].max <= 1e-12);
  CHECK(rows[2].mean == 0.0);
  CHECK(rows[2].max == 0.0);
  CHECK(rows[0].states == 1);
  CHECK_THROWS_AS(truncation_ablation(g, {e[0].psi}, {250}), std::invalid_argument);
  CHECK(reference_truncation_orders().size() == 9);
}

TEST_CASE("condensation fraction") {
  CHECK_FALSE(condensation_fraction(ZeroSet{}));
  CHECK(*condensation_fraction(make_set({{0, 0}})) == 1.0);
  CHECK(*condensation_fraction(make_set({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})) == 0.0);
  CHECK(*condensation_fraction(make_set({{0, 0}, {0, 2}, {0, -2}, {2, 0}})) == 0.75);
}

TEST_CASE("linspace") {
  const auto a = linspace(0.5, 2.3, 20);
  REQUIRE(a.size() == 20);
  CHECK(a.front() == 0.5);
  CHECK(a.back() == 2.3);
  CHECK(a[1] == doctest::Approx(0.5947).epsilon(1e-3));
  CHECK(a[18] == doctest::Approx(2.2053).epsilon(1e-3));
  CHECK(linspace(1.5, 1.5, 1) == std::vector<double>{1.5});
  const auto d = linspace(2.3, 0.5, 20);
  CHECK(d.front() == 2.3);
  CHECK(d.back() == 0.5);
}

TEST_CASE("seed statistics are recomputable") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0}, 1);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.count() == 4);
  CHECK(s.failed == 1);
  const auto e = summarize({});
  CHECK(e.count() == 0);
}

TEST_CASE("barrier sweep splittings") {
  const auto recs = barrier_sweep({1.0, 1.5, 2.0});
  REQUIRE(recs.size() == 3);
  const double want[] = {0.724988, 0.261909, 0.009717};
  for (int i = 0; i < 3; ++i) {
    CHECK(recs[i].ok);
    CHECK(recs[i].delta >= 0.0);
    CHECK(std::abs(recs[i].delta - want[i]) <= 2e-6);
    REQUIRE_FALSE(recs[i].excited.empty());
    CHECK(recs[i].excited.zeros[0] == Complex(0, 0));
  }
  const auto prof = splitting_profile(recs);
  CHECK(prof.monotone_decreasing);
  CHECK(prof.decades == doctest::Approx(std::log10(0.724988 / 0.009717)).epsilon(1e-4));
  CHECK_THROWS_AS(splitting_profile({recs[0]}), std::invalid_argument);
  CHECK(splitting_profile({recs[0], recs[0]}).decades == 0.0);
  const auto rev = barrier_sweep({2.0, 1.0});
  CHECK(rev[0].a == 2.0);
  CHECK(rev[1].a == 1.0);
  CHECK(sweep_to_csv(recs).rfind("a,", 0) == 0);
}

TEST_CASE("sweep results do not depend on the worker count") {
  const auto a = linspace(0.5, 2.3, 6);
  CHECK(sweep_to_csv(barrier_sweep(a, {}, 1)) == sweep_to_csv(barrier_sweep(a, {}, 3)));
}

TEST_CASE("grid ablation cells") {
  const auto rows = grid_ablation(reference_systems(), {1024, 4096});
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].n_points == 1024);
  CHECK(rows[0].system == "harmonic");
  CHECK(std::abs(rows[2].e1 - 2.324276) <= 2e-6);
  CHECK(std::abs(rows[6].e0 - 0.500000) <= 2e-6);
  CHECK(std::abs(rows[6].e1 - 1.499998) <= 2e-6);
  CHECK(std::abs(rows[5].delta - 0.009717) <= 2e-6);
  CHECK(std::abs(rows[11].delta - 0.009716) <= 2e-6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(rows[i].e0 - rows[i + 6].e0) <= 5e-5);
  const auto csv = grid_to_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("parameter counts of the capacity grid") {
  CHECK(capacity_parameter_count(2, 16) == 331);
  CHECK(capacity_parameter_count(4, 128) == 49931);
}

TEST_CASE("capacity row statistics") {
  std::vector<TrainedState> st(3);
  st[0].energy = 0.80107594 + 1e-6;
  st[1].energy = 0.80107594 + 3e-6;
  st[2].failed = true;
  const auto row = capacity_row(2, 16, 0.80107594, st);
  CHECK(row.parameters == 331);
  CHECK(row.error.count() == 2);
  CHECK(row.error.failed == 1);
  CHECK(row.error.mean == doctest::Approx(2e-6).epsilon(1e-6));
}

TEST_CASE("wavefunction error") {
  const auto g = make_grid(8.0, 1024);
  const auto e = solve_lowest(g, Potential::anharmonic(0.1), 1);
  auto w = wavefunction_error(e[0].psi, e[0].psi, g.spacing);
  CHECK(w.l2 == 0.0);
  CHECK(w.linf == 0.0);
  auto flipped = e[0].psi;
  for (double& v : flipped) v *= -3.0;
  w = wavefunction_error(flipped, e[0].psi, g.spacing);
  CHECK(w.l2 <= 1e-14);
  CHECK(w.linf <= 1e-14);
  auto bumped = e[0].psi;
  bumped[512] += 1e-4;
  w = wavefunction_error(bumped, e[0].psi, g.spacing);
  CHECK(w.l2 > 0.0);
  CHECK(w.linf == doctest::Approx(1e-4).epsilon(0.05));
}

TEST_CASE("L2 row from exact states") {
  const auto g = make_grid(8.0, 1024);
  const auto p = Potential::harmonic();
  const auto e = solve_lowest(g, p, 1);
  std::vector<TrainedState> st(2);
  for (auto& s : st) {
    s.energy = e[0].energy;
    s.psi = e[0].psi;
  }
  const auto row = l2_row(p, g, st);
  CHECK(row.energy_error.mean == 0.0);
  CHECK(row.l2.mean == 0.0);
  CHECK(row.linf.mean == 0.0);
  CHECK(row.l2_max == 0.0);
  CHECK(l2_systems().size() == 7);
  CHECK(reference_epsilons().size() == 15);
}
