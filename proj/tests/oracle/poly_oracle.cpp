#include "poly_oracle.hpp"

#include <limits>

namespace oracle {

std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<long double>> c{1.0L};
  for (const auto& r : roots) {
    const std::complex<long double> rl(r.real(), r.imag());
    std::vector<std::complex<long double>> next(c.size() + 1, 0.0L);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= rl * c[k];
    }
    c = std::move(next);
  }
  std::vector<double> out;
  for (const auto& v : c) out.push_back(static_cast<double>(v.real()));
  return out;
}

double max_matched_distance(const std::vector<std::complex<double>>& expected,
                            const std::vector<std::complex<double>>& found) {
  if (expected.size() != found.size()) return std::numeric_limits<double>::infinity();
  std::vector<char> used(found.size(), 0);
  double worst = 0.0;
  for (const auto& e : expected) {
    std::size_t best = found.size();
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (!used[j] && std::abs(found[j] - e) < d) {
        d = std::abs(found[j] - e);
        best = j;
      }
    }
    used[best] = 1;
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace oracle
