#include <stdexcept>
#include <cmath>
#include <numeric>

#include "bargzero/fdsolve.hpp"
#include "dense_jacobi.hpp"
#include "doctest.h"

using namespace bargzero;

namespace {

std::vector<std::vector<long double>> dense(const TridiagonalHamiltonian& h) {
  const std::size_t n = h.size();
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = h.diag[i];
    if (i + 1 < n) a[i][i + 1] = a[i + 1][i] = h.offdiag[i];
  }
  return a;
}

}  // namespace

TEST_CASE("Hamiltonian entries") {
  const auto g = make_grid(8.0, 1024);
  const auto h = build_hamiltonian(g, Potential::harmonic());
  const double inv = 1.0 / (g.spacing * g.spacing);
  CHECK(h.size() == 1024);
  CHECK(h.offdiag.size() == 1023);
  CHECK(h.diag[0] == doctest::Approx(inv + 32.0));
  for (double o : h.offdiag) CHECK(o == doctest::Approx(-0.5 * inv));
}

TEST_CASE("apply matches the dense product") {
  const auto g = make_grid(4.0, 17);
  const auto h = build_hamiltonian(g, Potential::double_well(1.0));
  std::vector<double> psi(17);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1;
  const auto hp = h.apply(psi);
  const auto a = dense(h);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < psi.size(); ++j) s += a[i][j] * psi[j];
    CHECK(hp[i] == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
  }
}

TEST_CASE("reference energies at L=8, Nx=1024") {
  const auto g = make_grid(8.0, 1024);
  struct Row {
    Potential p;
    double e0, e1;
  };
  for (const Row& r : {Row{Potential::harmonic(), 0.499992, 1.499962}, Row{Potential::anharmonic(0.1), 0.559135, 1.769438},
                       Row{Potential::double_well(1.5), 0.801076, 1.062985}}) {
    const auto e = solve_lowest(g, r.p, 2);
    CHECK(std::abs(e[0].energy - r.e0) <= 1e-6);
    CHECK(std::abs(e[1].energy - r.e1) <= 1e-6);
  }
}

TEST_CASE("eigenpairs agree with a dense Jacobi oracle") {
  for (std::size_t n : {8u, 16u, 33u, 64u}) {
    for (const auto& p : {Potential::harmonic(), Potential::anharmonic(0.5), Potential::double_well(1.5)}) {
      const auto g = make_grid(6.0, n);
      const auto h = build_hamiltonian(g, p);
      const auto ref = oracle::jacobi_eigen(dense(h));
      const int k = 4;
      const auto got = lowest_eigenpairs(h, k);
      REQUIRE(got.size() == static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        CHECK(std::abs(got[j].energy - static_cast<double>(ref.values[j])) <= 1e-10);
        // same direction up to sign; got is dx-normalised, ref has unit 2-norm
        long double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += got[j].psi[i] * ref.vectors[j][i];
        const double scale = std::sqrt(g.spacing);
        double worst = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double a = got[j].psi[i] * scale;
          const double b = static_cast<double>(ref.vectors[j][i]) * (dot < 0 ? -1.0 : 1.0);
          worst = std::max(worst, std::abs(a - b));
        }
        CHECK(worst <= 1e-10);
      }
    }
  }
}

TEST_CASE("normalisation, sign convention, orthogonality and parity") {
  const auto g = make_grid(8.0, 1024);
  for (const auto& p : {Potential::harmonic(), Potential::anharmonic(0.1), Potential::double_well(1.5),
                        Potential::double_well(2.0)}) {
    const auto e = solve_lowest(g, p, 3);
    for (const auto& s : e) {
      CHECK(inner_product(s.psi, s.psi, g.spacing) == doctest::Approx(1.0).epsilon(1e-12));
      const double peak = std::abs(*std::max_element(s.psi.begin(), s.psi.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
      const auto first = std::find_if(s.psi.begin(), s.psi.end(), [&](double v) { return std::abs(v) > 1e-3 * peak; });
      CHECK(*first > 0.0);
      const double sign = s.index % 2 == 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < g.n_points; ++i) CHECK(std::abs(s.psi[i] - sign * s.psi[g.mirror(i)]) <= 1e-9);
    }
    CHECK(std::abs(inner_product(e[0].psi, e[1].psi, g.spacing)) <= 1e-10);
    CHECK(std::abs(inner_product(e[0].psi, e[2].psi, g.spacing)) <= 1e-10);
    CHECK(e[0].energy < e[1].energy);
    CHECK(e[1].energy < e[2].energy);
  }
}

TEST_CASE("Sturm count brackets the eigenvalues") {
  const auto g = make_grid(8.0, 512);
  const auto h = build_hamiltonian(g, Potential::double_well(2.0));
  const auto e = lowest_eigenpairs(h, 3);
  CHECK(sturm_count(h, e[0].energy - 1e-9) == 0);
  CHECK(sturm_count(h, 0.5 * (e[0].energy + e[1].energy)) == 1);
  CHECK(sturm_count(h, 0.5 * (e[1].energy + e[2].energy)) == 2);
}

TEST_CASE("harmonic levels approach n + 1/2 with refinement") {
  const auto coarse = solve_lowest(make_grid(8.0, 512), Potential::harmonic(), 4);
  const auto fine = solve_lowest(make_grid(8.0, 4096), Potential::harmonic(), 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::abs(fine[n].energy - (n + 0.5)) < std::abs(coarse[n].energy - (n + 0.5)));
    CHECK(std::abs(fine[n].energy - (n + 0.5)) < 2e-5);
  }
}

TEST_CASE("helpers") {
  CHECK_THROWS_AS(normalize(std::vector<double>(5, 0.0), 0.1), std::invalid_argument);
  std::vector<double> v{0.0, -1e-6, -2.0, 1.0};
  fix_sign(v);
  CHECK(v[2] == 2.0);
  const auto n = normalize(std::vector<double>{3.0, 4.0}, 0.25);
  CHECK(inner_product(n, n, 0.25) == doctest::Approx(1.0));
  CHECK_THROWS(lowest_eigenpairs(build_hamiltonian(make_grid(1.0, 5), Potential::harmonic()), 6));
}
