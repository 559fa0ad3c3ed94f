#pragma once

// Minimal SVG scatter/line output for zero maps and sweep summaries.

#include <string>
#include <vector>

#include "bargzero/analysis.hpp"
#include "bargzero/bargmann.hpp"

namespace bargzero {

/// Zeros in the complex plane with the |z| = radius circle, axes through 0.
std::string svg_zero_map(const ZeroSet& zeros, double radius, const std::string& title);

/// Im z of every zero against a, coloured by |Re z|.
std::string svg_trajectories(const std::vector<SweepRecord>& records, const std::string& title);

/// log10(delta) against a.
std::string svg_splitting(const std::vector<SweepRecord>& records, const std::string& title);

}  // namespace bargzero
