#include "linenet/dbie.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace linenet {

unsigned precision_digits(Precision p) {
  switch (p) {
    case Precision::Double: return 0;
    case Precision::Digits40: return 40;
    case Precision::Digits80: return 80;
    case Precision::Digits160: return 160;
    case Precision::Digits320: return 320;
    case Precision::Auto: break;
  }
  return 0;
}

Precision parse_precision(const std::string& s) {
  if (s == "auto") return Precision::Auto;
  if (s == "double") return Precision::Double;
  if (s == "40") return Precision::Digits40;
  if (s == "80") return Precision::Digits80;
  if (s == "160") return Precision::Digits160;
  if (s == "320") return Precision::Digits320;
  throw ValidationError("unknown precision '" + s + "' (auto|double|40|80|160|320)");
}

std::string to_string(Precision p) {
  if (p == Precision::Auto) return "auto";
  if (p == Precision::Double) return "double";
  return std::to_string(precision_digits(p));
}

}  // namespace linenet

namespace linenet::dbie {

std::vector<double> dj_distribution(const GeometricMixture& g_in, double theta_tilde, int j_max) {
  if (j_max < 0) throw ValidationError("j_max must be >= 0");
  return dj_sequence(g_in, theta_tilde, j_max);
}

EmbeddedChain embedded_chain(const GeometricMixture& g_in, int m, double theta_N, double q) {
  if (m < 1) throw ValidationError("buffer size must be >= 1");
  const double tt = effective_theta(theta_N, q);
  EmbeddedChain out;
  out.P = embedded_matrix(g_in, m, tt, dj_sequence(g_in, tt, m));
  out.pi = embedded_stationary(out.P);
  return out;
}

double blocking_prob(const GeometricMixture& g_in, int m, double theta_N, double q) {
  const auto ch = embedded_chain(g_in, m, theta_N, q);
  return ch.pi[m - 1] * dj_sequence(g_in, effective_theta(theta_N, q), 0)[0];
}

GeometricMixture starvation_distribution(const GeometricMixture& g_in, const std::vector<double>& pi, double theta_N,
                                         double q) {
  return starvation_mixture(g_in, pi, effective_theta(theta_N, q)).first;
}

UpsilonResult upsilon(const GeometricMixture& g_in, int m, double theta_N, double q) {
  const auto r = analyze_node(g_in, m, theta_N, q);
  return {r.upsilon, r.alpha};
}

std::vector<double> perturb_equal(const std::vector<double>& eps, double delta, std::vector<std::string>* notes) {
  std::vector<double> out = eps;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    int rank = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (eps[j] == eps[i]) ++rank;
    if (rank == 0) continue;
    out[i] = eps[i] + delta * rank;
    if (!(out[i] > 0.0 && out[i] < 1.0)) throw ValidationError("perturbed erasure probability leaves (0,1)");
    if (notes) {
      std::ostringstream os;
      os.precision(17);
      os << "eps[" << i << "] perturbed from " << eps[i] << " to " << out[i];
      notes->push_back(os.str());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw ValidationError("perturbation collides with another erasure probability");
  return out;
}

namespace {

// log10 of the largest weight expected when convolving geometrics with these parameters.
double weight_magnitude(const std::vector<double>& eps) {
  double worst = 0.0;
  for (std::size_t l = 0; l < eps.size(); ++l) {
    double s = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k)
      if (k != l) s += std::log10((1.0 - eps[k]) / std::abs(eps[k] - eps[l]));
    worst = std::max(worst, s);
  }
  return std::max(worst, 0.0);
}

double min_gap(const std::vector<double>& eps) {
  double g = 1.0;
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = i + 1; j < eps.size(); ++j) g = std::min(g, std::abs(eps[i] - eps[j]));
  return g;
}

struct Attempt {
  DistSolution sol;
  bool precision_ok = true;
  std::string why;
};

template <class Real>
Attempt run(const std::vector<double>& eps, const std::vector<int>& m, const Options& opts, unsigned digits) {
  using std::abs;
  using std::log10;
  const int h = static_cast<int>(eps.size());
  std::vector<Real> e(h);
  for (int i = 0; i < h; ++i) e[i] = Real(eps[i]);
  std::vector<Real> pb(h, Real(0));
  for (std::size_t i = 0; i < opts.initial_pb.size() && static_cast<int>(i) < h - 1; ++i)
    pb[i] = Real(opts.initial_pb[i]);

  Attempt at;
  DistSolution& sol = at.sol;
  sol.digits = digits;
  std::vector<BasicMixture<Real>> f(h);
  std::vector<NodeResult<Real>> nodes(h - 1);
  const double digit_budget = digits == 0 ? 15.0 : static_cast<double>(digits);
  for (long c = 1; c <= opts.max_iter; ++c) {
    f[0] = BasicMixture<Real>::geometric(e[0]);
    std::vector<Real> next(h, Real(0));
    double worst_drift = 0.0, worst_mag = 0.0;
    for (int j = 0; j < h - 1; ++j) {
      nodes[j] = analyze_node(f[j], m[j], e[j + 1], pb[j + 1]);
      f[j + 1] = gm_convolve(nodes[j].upsilon, BasicMixture<Real>::geometric(e[j + 1]));
      worst_drift = std::max(worst_drift, to_double(abs(f[j + 1].weight_sum() - Real(1))));
      if (opts.compact) compact(f[j + 1]);
      worst_mag = std::max(worst_mag, to_double(log10(f[j + 1].max_abs_weight())));
      next[j] = nodes[j].blocking;
    }
    // Weights of size 10^k cost k digits to cancellation; keep ten spare.
    if (worst_drift > 1e-6 || worst_mag + 10.0 > digit_budget) {
      at.precision_ok = false;
      std::ostringstream os;
      os << "weights reach 1e" << static_cast<int>(worst_mag) << " with weight-sum drift " << worst_drift;
      at.why = os.str();
      return at;
    }
    double change = 0.0;
    for (int i = 0; i < h; ++i) change = std::max(change, to_double(abs(next[i] - pb[i])));
    pb = next;
    sol.iterations = c;
    sol.residual = change;
    if (change <= opts.tol) break;
    if (c == opts.max_iter) throw ConvergenceError("distribution-based estimate did not converge", change);
  }
  sol.f.reserve(h);
  for (const auto& x : f) sol.f.push_back(x.template cast<WideReal>());
  sol.pb.resize(h);
  for (int i = 0; i < h; ++i) sol.pb[i] = to_double(pb[i]);
  for (const auto& nd : nodes) {
    std::vector<double> pi;
    for (const auto& v : nd.pi) pi.push_back(to_double(v));
    sol.pi_embedded.push_back(std::move(pi));
    sol.alpha.push_back(to_double(nd.alpha));
    sol.starvation_norm.push_back(to_double(nd.starvation_norm));
  }
  return at;
}

Attempt run_at(unsigned digits, const std::vector<double>& eps, const std::vector<int>& m, const Options& opts) {
  switch (digits) {
    case 0: return run<double>(eps, m, opts, 0);
    case 40: return run<MpReal<40>>(eps, m, opts, 40);
    case 80: return run<MpReal<80>>(eps, m, opts, 80);
    case 160: return run<MpReal<160>>(eps, m, opts, 160);
    default: return run<MpReal<320>>(eps, m, opts, 320);
  }
}

}  // namespace

DistSolution solve(const NetworkSpec& spec, const Options& opts) {
  spec.validate();
  std::vector<std::string> notes;
  std::vector<double> eps = spec.eps;
  if (!spec.distinct_eps()) {
    if (!opts.auto_perturb) throw ValidationError("erasure probabilities must be pairwise distinct");
    eps = perturb_equal(spec.eps, opts.perturbation, &notes);
  }
  const double gap = min_gap(eps);
  const unsigned tiers[] = {40, 80, 160, 320};
  std::vector<unsigned> ladder;
  if (opts.precision == Precision::Double) {
    if (gap < 1e-3) throw ValidationError("double precision refused: erasure probabilities differ by less than 1e-3");
    ladder = {0};
  } else if (opts.precision == Precision::Auto) {
    const double need = weight_magnitude(eps) + 25.0;
    for (unsigned t : tiers)
      if (t >= need || t == 320) ladder.push_back(t);
  } else {
    ladder = {precision_digits(opts.precision)};
  }
  std::string last;
  for (unsigned d : ladder) {
    Attempt at = run_at(d, eps, spec.buffers, opts);
    if (at.precision_ok) {
      at.sol.eps_used = eps;
      at.sol.notes = notes;
      if (!last.empty()) at.sol.notes.push_back("precision escalated after: " + last);
      return at.sol;
    }
    last = at.why;
  }
  throw NumericError("mixture weights exceed the precision budget: " + last);
}

double capacity(const DistSolution& sol) {
  if (sol.f.empty()) throw NumericError("empty solution");
  const WideReal mean = sol.f.back().mean();
  if (!(mean > 0)) throw NumericError("non-positive mean inter-arrival time");
  return to_double(WideReal(1) / mean);
}

}  // namespace linenet::dbie
