#include "bargzero/model.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace bargzero {

Grid make_grid(double half_width, std::size_t n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("make_grid: half width must be positive");
  if (n_points < 3)
    throw std::invalid_argument("make_grid: need at least 3 grid points");

  Grid g;
  g.half_width = half_width;
  g.n_points = n_points;
  g.spacing = 2.0 * half_width / static_cast<double>(n_points - 1);
  g.points.resize(n_points);
  const std::size_t half = n_points / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double x = -half_width + static_cast<double>(i) * g.spacing;
    g.points[i] = x;
    g.points[n_points - 1 - i] = -x;
  }
  if (n_points % 2 == 1) g.points[half] = 0.0;
  return g;
}

Potential Potential::harmonic() { return {PotentialKind::Harmonic, 0.0}; }

Potential Potential::anharmonic(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("anharmonic potential requires lambda > 0");
  return {PotentialKind::Anharmonic, lambda};
}

Potential Potential::double_well(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("double-well potential requires a > 0");
  return {PotentialKind::DoubleWell, a};
}

double Potential::barrier() const {
  if (kind_ != PotentialKind::DoubleWell)
    throw std::logic_error("barrier() requested on a non-double-well potential");
  return param_;
}

double Potential::operator()(double x) const noexcept {
  const double x2 = x * x;
  switch (kind_) {
    case PotentialKind::Harmonic:
      return 0.5 * x2;
    case PotentialKind::Anharmonic:
      return 0.5 * x2 + param_ * x2 * x2;
    case PotentialKind::DoubleWell: {
      const double u = x2 - param_ * param_;
      return 0.25 * u * u;
    }
  }
  return 0.0;
}

std::vector<double> eval_potential(const Potential& p, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = p(xs[i]);
  return out;
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

}  // namespace

Potential parse_potential(std::string_view text) {
  if (text == "harmonic") return Potential::harmonic();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("unknown potential '" + std::string(text) +
                                "' (expected harmonic, anharmonic:<lambda> or dw:<a>)");
  const auto head = text.substr(0, colon);
  const auto tail = text.substr(colon + 1);
  if (head == "anharmonic") return Potential::anharmonic(parse_number(tail, "lambda"));
  if (head == "dw") return Potential::double_well(parse_number(tail, "barrier a"));
  throw std::invalid_argument("unknown potential kind '" + std::string(head) + "'");
}

std::string format_decimal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_string(const Potential& p) {
  switch (p.kind()) {
    case PotentialKind::Harmonic:
      return "harmonic";
    case PotentialKind::Anharmonic:
      return "anharmonic:" + format_decimal(p.parameter());
    case PotentialKind::DoubleWell:
      return "dw:" + format_decimal(p.parameter());
  }
  return {};
}

std::string file_label(const Potential& p) {
  auto s = to_string(p);
  for (auto& c : s)
    if (c == ':') c = '_';
  return s;
}

}  // namespace bargzero
