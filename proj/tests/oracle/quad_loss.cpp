#include "quad_loss.hpp"

extern "C" {
#include <quadmath.h>
}

namespace oracle {

QuadProblem make_problem(const bargzero::Grid& grid, const bargzero::Potential& system,
                         const bargzero::LossSpec& spec, const bargzero::AnsatzParams& layout) {
  QuadProblem p;
  p.dx = grid.spacing;
  for (double xi : grid.points) {
    const quad x = xi;
    p.x.push_back(x);
    const quad c = system.parameter();
    switch (system.kind()) {
      case bargzero::PotentialKind::Harmonic: p.v.push_back(x * x / 2); break;
      case bargzero::PotentialKind::Anharmonic: p.v.push_back(x * x / 2 + c * x * x * x * x); break;
      case bargzero::PotentialKind::DoubleWell: p.v.push_back((x * x - c * c) * (x * x - c * c) / 4); break;
    }
  }
  p.double_well = system.kind() == bargzero::PotentialKind::DoubleWell;
  p.parity = layout.parity;
  const auto arch = layout.net.architecture();
  p.depth = arch.depth;
  p.width = arch.width;
  p.prefactor_terms = static_cast<int>(layout.prefactor.size());
  p.components = static_cast<int>(layout.log_widths.size());
  p.excited = spec.target == bargzero::Target::Excited;
  p.alpha = spec.alpha;
  for (double r : spec.reference_ground) p.reference.push_back(r);
  return p;
}

namespace {

quad net_eval(const QuadProblem& p, const std::vector<quad>& f, std::size_t net_start, quad x) {
  std::vector<quad> h(static_cast<std::size_t>(p.width)), next(h.size());
  std::size_t k = net_start;
  const std::size_t w = h.size();
  for (std::size_t r = 0; r < w; ++r) h[r] = f[k + r] * x;
  k += w;
  for (std::size_t r = 0; r < w; ++r) h[r] = tanhq(h[r] + f[k + r]);
  k += w;
  for (int l = 1; l < p.depth; ++l) {
    for (std::size_t r = 0; r < w; ++r) {
      quad s = 0;
      for (std::size_t c = 0; c < w; ++c) s += f[k + r * w + c] * h[c];
      next[r] = s;
    }
    k += w * w;
    for (std::size_t r = 0; r < w; ++r) next[r] = tanhq(next[r] + f[k + r]);
    k += w;
    h.swap(next);
  }
  quad out = 0;
  for (std::size_t r = 0; r < w; ++r) out += f[k + r] * h[r];
  return out + f[k + w];
}

}  // namespace

quad quad_loss(const QuadProblem& p, const std::vector<quad>& f) {
  std::size_t k = 0;
  const quad eps = f[k++];
  quad a = 0;
  if (p.double_well) a = expq(f[k++]);
  std::vector<quad> sigma, mix, c;
  for (int i = 0; i < p.components; ++i) sigma.push_back(expq(f[k++]));
  if (p.double_well)
    for (int i = 0; i < p.components; ++i) mix.push_back(f[k++]);
  for (int i = 0; i < p.prefactor_terms; ++i) c.push_back(f[k++]);
  const std::size_t net_start = k;

  const std::size_t n = p.x.size();
  std::vector<quad> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const quad x = p.x[i];
    quad env;
    if (p.double_well) {
      env = 0;
      for (int j = 0; j < p.components; ++j) {
        const quad s2 = 2 * sigma[j] * sigma[j];
        env += mix[j] * (expq(-(x - a) * (x - a) / s2) + p.parity * expq(-(x + a) * (x + a) / s2));
      }
    } else {
      env = expq(-x * x / (2 * sigma[0] * sigma[0]));
      if (p.parity < 0) env *= x;
    }
    const quad u = p.double_well ? x * x - a * a : x * x;
    quad pre = 1, upow = 1;
    for (const quad ck : c) {
      upow *= u;
      pre += ck * upow;
    }
    // bracket parity = parity * envelope parity = +1
    const quad m = (net_eval(p, f, net_start, x) + net_eval(p, f, net_start, -x)) / 2;
    psi[i] = env * pre * (1 + eps * m);
  }

  const quad kin = 1 / (p.dx * p.dx);
  quad num = 0, norm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    quad hpsi = (kin + p.v[i]) * psi[i];
    if (i > 0) hpsi -= kin / 2 * psi[i - 1];
    if (i + 1 < n) hpsi -= kin / 2 * psi[i + 1];
    num += psi[i] * hpsi;
    norm += psi[i] * psi[i];
  }
  quad loss = num / norm;
  if (p.excited) {
    quad s = 0;
    for (std::size_t i = 0; i < n; ++i) s += psi[i] * p.reference[i];
    const quad overlap = p.dx * s / sqrtq(p.dx * norm);
    loss += p.alpha * overlap * overlap;
  }
  return loss;
}

std::vector<double> central_gradient(const QuadProblem& p, const Eigen::VectorXd& flat,
                                     const std::vector<std::size_t>& indices, double h) {
  std::vector<quad> f(static_cast<std::size_t>(flat.size()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) f[static_cast<std::size_t>(i)] = flat[i];
  std::vector<double> out;
  for (auto idx : indices) {
    auto fp = f, fm = f;
    fp[idx] += h;
    fm[idx] -= h;
    out.push_back(static_cast<double>((quad_loss(p, fp) - quad_loss(p, fm)) / (2 * quad(h))));
  }
  return out;
}

}  // namespace oracle
