#include "bargzero/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace bargzero {
namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(title) +
         "</text>\n";
}

std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string s = "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(kWidth - 2 * kMargin) +
                  "\" height=\"" + num(kHeight - 2 * kMargin) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto tick = [&](double v, bool xaxis) {
    if (xaxis)
      s += "<text x=\"" + num(f.px(v)) + "\" y=\"" + num(kHeight - kMargin + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(v) + "</text>\n";
    else
      s += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(f.py(v) + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(v) + "</text>\n";
  };
  for (int i = 0; i <= 4; ++i) {
    tick(f.x0 + (f.x1 - f.x0) * i / 4.0, true);
    tick(f.y0 + (f.y1 - f.y0) * i / 4.0, false);
  }
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(xlabel) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 14 " + num(kHeight / 2) +
       ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(ylabel) + "</text>\n";
  return s;
}

std::string dot(double x, double y, const std::string& colour, double r = 3.5) {
  return "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" fill=\"" + colour + "\"/>\n";
}

// Blue (0) to red (1).
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 * t), 40, static_cast<int>(255 * (1 - t)));
  return buf;
}

}  // namespace

std::string svg_zero_map(const ZeroSet& zeros, double radius, const std::string& title) {
  const double r = std::isfinite(radius) ? radius : 6.0;
  const double ext = 1.1 * r;
  const Frame f{-ext, ext, -ext, ext};
  std::string s = header(title) + axes(f, "Re z", "Im z");
  s += "<line x1=\"" + num(f.px(-ext)) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(f.px(ext)) + "\" y2=\"" +
       num(f.py(0)) + "\" stroke=\"#bbb\"/>\n";
  s += "<line x1=\"" + num(f.px(0)) + "\" y1=\"" + num(f.py(-ext)) + "\" x2=\"" + num(f.px(0)) + "\" y2=\"" +
       num(f.py(ext)) + "\" stroke=\"#bbb\"/>\n";
  s += "<ellipse cx=\"" + num(f.px(0)) + "\" cy=\"" + num(f.py(0)) + "\" rx=\"" + num(f.px(r) - f.px(0)) +
       "\" ry=\"" + num(f.py(0) - f.py(r)) + "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  for (auto z : zeros.zeros)
    if (std::abs(z) <= ext) s += dot(f.px(z.real()), f.py(z.imag()), "#c0392b");
  return s + "</svg>\n";
}

std::string svg_trajectories(const std::vector<SweepRecord>& records, const std::string& title) {
  double amin = std::numeric_limits<double>::infinity(), amax = -amin, ymax = 1.0, remax = 1e-12;
  for (const auto& r : records) {
    if (!r.ok) continue;
    amin = std::min(amin, r.a);
    amax = std::max(amax, r.a);
    for (const auto* zs : {&r.ground, &r.excited})
      for (auto z : zs->zeros) {
        ymax = std::max(ymax, std::abs(z.imag()));
        remax = std::max(remax, std::abs(z.real()));
      }
  }
  if (!std::isfinite(amin)) amin = 0.0, amax = 1.0;
  if (amax == amin) amin -= 0.5, amax += 0.5;
  const Frame f{amin, amax, -1.05 * ymax, 1.05 * ymax};
  std::string s = header(title) + axes(f, "a", "Im z");
  for (const auto& r : records) {
    if (!r.ok) continue;
    for (auto z : r.ground.zeros) s += dot(f.px(r.a), f.py(z.imag()), ramp(std::abs(z.real()) / remax), 3.0);
    for (auto z : r.excited.zeros) {
      const double x = f.px(r.a), y = f.py(z.imag());
      s += "<rect x=\"" + num(x - 2.5) + "\" y=\"" + num(y - 2.5) + "\" width=\"5\" height=\"5\" fill=\"" +
           ramp(std::abs(z.real()) / remax) + "\"/>\n";
    }
  }
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kMargin - 6) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">circles: ground, squares: excited; "
       "blue to red: |Re z| 0 to " +
       num(remax) + "</text>\n";
  return s + "</svg>\n";
}

std::string svg_splitting(const std::vector<SweepRecord>& records, const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records)
    if (r.ok && r.delta > 0.0) pts.emplace_back(r.a, std::log10(r.delta));
  double x0 = 0, x1 = 1, y0 = -1, y1 = 0;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (auto [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  const Frame f{x0, x1, y0 - pad, y1 + pad};
  std::string s = header(title) + axes(f, "a", "log10 delta");
  std::vector<std::pair<double, double>> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() > 1) {
    s += "<polyline fill=\"none\" stroke=\"#2c3e50\" points=\"";
    for (auto [x, y] : sorted) s += num(f.px(x)) + "," + num(f.py(y)) + " ";
    s += "\"/>\n";
  }
  for (auto [x, y] : pts) s += dot(f.px(x), f.py(y), "#2c3e50", 3.0);
  return s + "</svg>\n";
}

}  // namespace bargzero
