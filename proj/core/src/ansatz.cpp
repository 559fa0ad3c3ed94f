#include "bargzero/ansatz.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bargzero {

void tanh_inplace(Eigen::MatrixXd& m) {
  // tanh(z) = 1 - 2 / (exp(2z) + 1); exact limits +-1 for overflow/underflow.
  m.array() = 1.0 - 2.0 / ((2.0 * m.array()).exp() + 1.0);
}

CorrectionNet CorrectionNet::zeros(const NetArchitecture& arch) {
  if (arch.depth < 1 || arch.width < 1)
    throw std::invalid_argument("correction net needs depth >= 1 and width >= 1");
  CorrectionNet net;
  net.weights.push_back(Eigen::MatrixXd::Zero(arch.width, 1));
  net.biases.push_back(Eigen::VectorXd::Zero(arch.width));
  for (int l = 1; l < arch.depth; ++l) {
    net.weights.push_back(Eigen::MatrixXd::Zero(arch.width, arch.width));
    net.biases.push_back(Eigen::VectorXd::Zero(arch.width));
  }
  net.head_weights = Eigen::RowVectorXd::Zero(arch.width);
  net.head_bias = 0.0;
  return net;
}

NetArchitecture CorrectionNet::architecture() const {
  return {static_cast<int>(weights.size()), static_cast<int>(head_weights.size())};
}

std::size_t CorrectionNet::parameter_count() const {
  std::size_t n = 1 + static_cast<std::size_t>(head_weights.size());
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

Eigen::RowVectorXd CorrectionNet::forward(const Eigen::RowVectorXd& x, NetTape* tape) const {
  Eigen::MatrixXd h = weights[0] * x;  // outer product, width x n
  h.colwise() += biases[0];
  tanh_inplace(h);
  if (tape) {
    tape->input = x;
    tape->hidden.clear();
    tape->hidden.reserve(weights.size());
  }
  for (std::size_t l = 1; l < weights.size(); ++l) {
    Eigen::MatrixXd next(weights[l].rows(), h.cols());
    next.noalias() = weights[l] * h;
    next.colwise() += biases[l];
    tanh_inplace(next);
    if (tape)
      tape->hidden.push_back(std::move(h));
    h = std::move(next);
  }
  Eigen::RowVectorXd out = head_weights * h;
  out.array() += head_bias;
  if (tape) tape->hidden.push_back(std::move(h));
  return out;
}

namespace {

// acc += a * b^T over sample columns. Eigen's kernel is about twice as fast
// on short inner dimensions, so the sum is taken in fixed blocks.
void accumulate_outer(Eigen::MatrixXd& acc, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  constexpr Eigen::Index block = 64;
  const Eigen::Index n = a.cols();
  for (Eigen::Index k = 0; k < n; k += block) {
    const Eigen::Index len = std::min(block, n - k);
    acc.noalias() += a.middleCols(k, len) * b.middleCols(k, len).transpose();
  }
}

}  // namespace

void CorrectionNet::backward(const NetTape& tape, const Eigen::RowVectorXd& grad_out,
                             CorrectionNet& grad) const {
  const std::size_t depth = weights.size();
  const Eigen::MatrixXd& top = tape.hidden[depth - 1];
  grad.head_weights.noalias() += grad_out * top.transpose();
  grad.head_bias += grad_out.sum();

  Eigen::MatrixXd delta = head_weights.transpose() * grad_out;
  delta.array() *= 1.0 - top.array().square();
  for (std::size_t l = depth; l-- > 1;) {
    const Eigen::MatrixXd& below = tape.hidden[l - 1];
    accumulate_outer(grad.weights[l], delta, below);
    grad.biases[l] += delta.rowwise().sum();
    Eigen::MatrixXd prev(below.rows(), below.cols());
    prev.noalias() = weights[l].transpose() * delta;
    prev.array() *= 1.0 - below.array().square();
    delta = std::move(prev);
  }
  grad.weights[0].noalias() += delta * tape.input.transpose();
  grad.biases[0] += delta.rowwise().sum();
}

EnvelopeKind envelope_kind(PotentialKind kind) noexcept {
  return kind == PotentialKind::DoubleWell ? EnvelopeKind::DoubleWellMixture : EnvelopeKind::Gaussian;
}

std::size_t AnsatzParams::parameter_count() const {
  std::size_t n = net.parameter_count() + log_widths.size() + mix_weights.size() + prefactor.size();
  if (envelope() == EnvelopeKind::DoubleWellMixture) ++n;
  return n;
}

std::size_t AnsatzParams::flat_size() const { return parameter_count() + 1; }

Eigen::VectorXd AnsatzParams::pack() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(flat_size()));
  Eigen::Index k = 0;
  flat[k++] = epsilon;
  if (envelope() == EnvelopeKind::DoubleWellMixture) flat[k++] = log_barrier;
  for (double v : log_widths) flat[k++] = v;
  for (double v : mix_weights) flat[k++] = v;
  for (double v : prefactor) flat[k++] = v;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat[k++] = w(r, c);
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) flat[k++] = net.biases[l][r];
  }
  for (Eigen::Index c = 0; c < net.head_weights.size(); ++c) flat[k++] = net.head_weights[c];
  flat[k++] = net.head_bias;
  return flat;
}

void AnsatzParams::unpack(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != flat_size())
    throw std::invalid_argument("AnsatzParams::unpack: flat vector has the wrong size");
  Eigen::Index k = 0;
  epsilon = flat[k++];
  if (envelope() == EnvelopeKind::DoubleWellMixture) log_barrier = flat[k++];
  for (double& v : log_widths) v = flat[k++];
  for (double& v : mix_weights) v = flat[k++];
  for (double& v : prefactor) v = flat[k++];
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) net.biases[l][r] = flat[k++];
  }
  for (Eigen::Index c = 0; c < net.head_weights.size(); ++c) net.head_weights[c] = flat[k++];
  net.head_bias = flat[k++];
}

AnsatzParams AnsatzParams::zeros_like() const {
  AnsatzParams z = *this;
  z.unpack(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(flat_size())));
  return z;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("log_spaced: bad range");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

AnsatzParams init_params(std::uint64_t seed, const AnsatzConfig& config, const Potential& system,
                         int parity) {
  if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
  AnsatzParams p;
  p.system = system.kind();
  p.parity = parity;
  p.seed = seed;
  p.epsilon = config.epsilon_init;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> weight_dist(0.0, config.weight_std);
  std::normal_distribution<double> coeff_dist(0.0, config.prefactor_std);

  p.net = CorrectionNet::zeros(config.arch);
  for (auto& w : p.net.weights)
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = weight_dist(rng);
  for (Eigen::Index c = 0; c < p.net.head_weights.size(); ++c) p.net.head_weights[c] = weight_dist(rng);

  p.prefactor.resize(static_cast<std::size_t>(config.prefactor_terms));
  for (auto& c : p.prefactor) c = coeff_dist(rng);

  if (p.envelope() == EnvelopeKind::DoubleWellMixture) {
    p.log_barrier = std::log(system.barrier());
    for (double s : log_spaced(config.width_min, config.width_max, config.mixture_components))
      p.log_widths.push_back(std::log(s));
    p.mix_weights.assign(static_cast<std::size_t>(config.mixture_components),
                         1.0 / config.mixture_components);
  } else {
    p.log_widths = {std::log(config.gaussian_width_init)};
  }
  return p;
}

namespace {

void check_system(const AnsatzParams& params, const Potential& system) {
  if (params.system != system.kind())
    throw std::invalid_argument("ansatz parameters were built for a different potential family");
}

}  // namespace

std::vector<double> eval_envelope(const AnsatzParams& params, const Potential& system,
                                  std::span<const double> x) {
  check_system(params, system);
  std::vector<double> out(x.size());
  if (params.envelope() == EnvelopeKind::Gaussian) {
    const double sigma = std::exp(params.log_widths.at(0));
    const double inv2s2 = 0.5 / (sigma * sigma);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = std::exp(-x[i] * x[i] * inv2s2);
      out[i] = params.parity > 0 ? g : x[i] * g;
    }
    return out;
  }
  const double a = std::exp(params.log_barrier);
  const double p = params.parity;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < params.log_widths.size(); ++k) {
      const double sigma = std::exp(params.log_widths[k]);
      const double inv2s2 = 0.5 / (sigma * sigma);
      const double dm = x[i] - a, dp = x[i] + a;
      s += params.mix_weights[k] * (std::exp(-dm * dm * inv2s2) + p * std::exp(-dp * dp * inv2s2));
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> eval_prefactor(const AnsatzParams& params, const Potential& system,
                                   std::span<const double> x) {
  check_system(params, system);
  const double shift =
      params.envelope() == EnvelopeKind::DoubleWellMixture ? std::exp(2.0 * params.log_barrier) : 0.0;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] * x[i] - shift;
    double acc = 0.0;
    for (std::size_t k = params.prefactor.size(); k-- > 0;) acc = (acc + params.prefactor[k]) * u;
    out[i] = 1.0 + acc;
  }
  return out;
}

std::vector<double> eval_ansatz(const AnsatzParams& params, const Potential& system,
                                std::span<const double> x) {
  auto env = eval_envelope(params, system, x);
  const auto pre = eval_prefactor(params, system, x);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::RowVectorXd xs(n), neg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs[i] = x[static_cast<std::size_t>(i)];
    neg[i] = -xs[i];
  }
  const double q = params.bracket_parity();
  Eigen::RowVectorXd m_pos, m_neg;
  if (params.epsilon != 0.0) {
    m_pos = params.net.forward(xs);
    m_neg = params.net.forward(neg);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double bracket = 1.0;
    if (params.epsilon != 0.0) {
      const auto j = static_cast<Eigen::Index>(i);
      bracket += params.epsilon * 0.5 * (m_pos[j] + q * m_neg[j]);
    }
    env[i] *= pre[i] * bracket;
  }
  return env;
}

namespace {

const char* system_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Anharmonic: return "anharmonic";
    case PotentialKind::DoubleWell: return "double_well";
  }
  return "";
}

PotentialKind system_from_name(const std::string& s) {
  if (s == "harmonic") return PotentialKind::Harmonic;
  if (s == "anharmonic") return PotentialKind::Anharmonic;
  if (s == "double_well") return PotentialKind::DoubleWell;
  throw std::invalid_argument("unknown system '" + s + "' in parameter file");
}

}  // namespace

std::string params_to_json(const AnsatzParams& params, int indent) {
  using nlohmann::json;
  json j;
  j["format"] = "bargzero.ansatz/1";
  j["system"] = system_name(params.system);
  j["parity"] = params.parity;
  j["seed"] = params.seed;
  const auto arch = params.net.architecture();
  j["architecture"] = {{"depth", arch.depth}, {"width", arch.width}, {"activation", "tanh"}};
  j["parameter_count"] = params.parameter_count();
  j["epsilon"] = params.epsilon;
  if (params.envelope() == EnvelopeKind::DoubleWellMixture) j["log_barrier"] = params.log_barrier;
  j["log_widths"] = params.log_widths;
  j["mix_weights"] = params.mix_weights;
  j["prefactor"] = params.prefactor;
  json layers = json::array();
  for (std::size_t l = 0; l < params.net.weights.size(); ++l) {
    const auto& w = params.net.weights[l];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    const auto& b = params.net.biases[l];
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"weights", flat},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  const auto& hw = params.net.head_weights;
  j["net"] = {{"layers", layers},
              {"head_weights", std::vector<double>(hw.data(), hw.data() + hw.size())},
              {"head_bias", params.net.head_bias}};
  return j.dump(indent);
}

namespace {

AnsatzParams parse_params_document(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  if (j.value("format", "") != "bargzero.ansatz/1")
    throw std::invalid_argument("not a bargzero ansatz parameter document");
  AnsatzParams p;
  p.system = system_from_name(j.at("system").get<std::string>());
  p.parity = j.at("parity").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.epsilon = j.at("epsilon").get<double>();
  if (p.envelope() == EnvelopeKind::DoubleWellMixture) p.log_barrier = j.at("log_barrier").get<double>();
  p.log_widths = j.at("log_widths").get<std::vector<double>>();
  p.mix_weights = j.at("mix_weights").get<std::vector<double>>();
  p.prefactor = j.at("prefactor").get<std::vector<double>>();
  const auto& jn = j.at("net");
  for (const auto& layer : jn.at("layers")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto flat = layer.at("weights").get<std::vector<double>>();
    const auto bias = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols || static_cast<Eigen::Index>(bias.size()) != rows)
      throw std::invalid_argument("inconsistent layer shape in parameter file");
    Eigen::MatrixXd w(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = flat[k++];
    p.net.weights.push_back(std::move(w));
    p.net.biases.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), rows));
  }
  const auto hw = jn.at("head_weights").get<std::vector<double>>();
  p.net.head_weights = Eigen::Map<const Eigen::RowVectorXd>(hw.data(), static_cast<Eigen::Index>(hw.size()));
  p.net.head_bias = jn.at("head_bias").get<double>();
  if (p.net.weights.empty() || p.net.weights[0].cols() != 1)
    throw std::invalid_argument("parameter file: first layer must take a scalar input");
  return p;
}

}  // namespace

AnsatzParams params_from_json(const std::string& text) {
  try {
    return parse_params_document(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed parameter file: ") + e.what());
  }
}

}  // namespace bargzero
