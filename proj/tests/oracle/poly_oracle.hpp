#pragma once

#include <complex>
#include <vector>

namespace oracle {

/// Real coefficients (lowest order first) of prod (z - r_k). The roots must
/// be closed under conjugation; products are formed in long double.
std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots);

/// Largest distance after greedily matching each expected root to its
/// nearest unused found root.
double max_matched_distance(const std::vector<std::complex<double>>& expected,
                            const std::vector<std::complex<double>>& found);

}  // namespace oracle
