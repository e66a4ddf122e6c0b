#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "linenet/errors.hpp"
#include "linenet/mixture.hpp"
#include "linenet/model.hpp"
#include "linenet/precision.hpp"

namespace linenet::dbie {

// Per-epoch failure probability of a relay's service attempt: the link
// erases (theta_N) or the delivered packet is refused downstream (q).
template <class Real>
Real effective_theta(const Real& theta_N, const Real& q) {
  return theta_N + (Real(1) - theta_N) * q;
}

// rho_l: probability that a service completes strictly before the next
// arrival, for the geometric component with parameter theta_l.
template <class Real>
Real completion_ratio(const Real& theta, const Real& theta_tilde) {
  return theta * (Real(1) - theta_tilde) / (Real(1) - theta * theta_tilde);
}

// D_j: probability of j potential departures during one inter-arrival time.
template <class Real>
std::vector<Real> dj_sequence(const BasicMixture<Real>& g, const Real& theta_tilde, int j_max) {
  std::vector<Real> D(j_max + 1, Real(0));
  for (const auto& t : g.terms) {
    const Real a = t.p * (Real(1) - t.theta) / t.theta;
    const Real denom = Real(1) - t.theta * theta_tilde;
    const Real rho = completion_ratio(t.theta, theta_tilde);
    Real rj(1);
    for (int j = 0; j <= j_max; ++j) {
      D[j] += a * (rj / denom - (j == 0 ? Real(1) : Real(0)));
      rj *= rho;
    }
  }
  return D;
}

// sum_{k >= i} D_k for i >= 1.
template <class Real>
Real dj_tail(const BasicMixture<Real>& g, const Real& theta_tilde, int i) {
  using std::pow;
  Real s(0);
  for (const auto& t : g.terms) s += t.p / t.theta * pow(completion_ratio(t.theta, theta_tilde), i);
  return s;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
template <class Real>
std::vector<Real> dense_solve(std::vector<std::vector<Real>> A, std::vector<Real> b) {
  using std::abs;
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(A[r][c]) > abs(A[piv][c])) piv = r;
    if (A[piv][c] == Real(0)) throw NumericError("embedded chain is reducible");
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const Real f = A[r][c] / A[c][c];
      if (f == Real(0)) continue;
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t r = n; r-- > 0;) {
    Real s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

template <class Real>
struct NodeResult {
  std::vector<Real> D;                   // D_0..D_m
  std::vector<std::vector<Real>> P;      // occupancy just after arrivals, states 1..m
  std::vector<Real> pi;
  Real blocking = Real(0);
  BasicMixture<Real> starvation;         // f^X
  Real starvation_norm = Real(0);        // Pr[queue empties before the next arrival]
  Real alpha = Real(0);
  BasicMixture<Real> upsilon;            // (1 - alpha) I + alpha f^X
};

template <class Real>
std::vector<std::vector<Real>> embedded_matrix(const BasicMixture<Real>& g, int m, const Real& theta_tilde,
                                               const std::vector<Real>& D) {
  std::vector<std::vector<Real>> P(m, std::vector<Real>(m, Real(0)));
  for (int i = 1; i <= m; ++i) {
    P[i - 1][0] += dj_tail(g, theta_tilde, i);
    for (int j = 2; j <= m; ++j)
      if (i + 1 - j >= 0) P[i - 1][j - 1] += D[i + 1 - j];
    if (i - m >= 0) P[i - 1][m - 1] += D[i - m];
  }
  return P;
}

template <class Real>
std::vector<Real> embedded_stationary(const std::vector<std::vector<Real>>& P) {
  const std::size_t m = P.size();
  std::vector<std::vector<Real>> A(m, std::vector<Real>(m, Real(0)));
  for (std::size_t j = 0; j + 1 < m; ++j)
    for (std::size_t i = 0; i < m; ++i) A[j][i] = (i == j ? Real(1) : Real(0)) - P[i][j];
  for (std::size_t i = 0; i < m; ++i) A[m - 1][i] = Real(1);
  std::vector<Real> b(m, Real(0));
  b[m - 1] = Real(1);
  return dense_solve(std::move(A), std::move(b));
}

// Starvation-gap mixture on the parameters of g, and its normalizer.
template <class Real>
std::pair<BasicMixture<Real>, Real> starvation_mixture(const BasicMixture<Real>& g, const std::vector<Real>& pi,
                                                       const Real& theta_tilde) {
  BasicMixture<Real> fx;
  Real Z(0);
  for (const auto& t : g.terms) {
    const Real rho = completion_ratio(t.theta, theta_tilde);
    Real rk = rho, acc(0);
    for (std::size_t k = 0; k < pi.size(); ++k) {
      acc += pi[k] * rk;
      rk *= rho;
    }
    fx.terms.push_back({t.p * acc, t.theta});
    Z += t.p * acc;
  }
  if (!(Z > Real(0))) throw NumericError("starvation probability vanishes; starvation gap undefined");
  for (auto& t : fx.terms) t.p /= Z;
  return {fx, Z};
}

// Full single-relay analysis for an input inter-arrival mixture g (no atom),
// buffer m, outgoing-link erasure theta_N and downstream blocking q.
template <class Real>
NodeResult<Real> analyze_node(const BasicMixture<Real>& g, int m, const Real& theta_N, const Real& q) {
  if (m < 1) throw ValidationError("buffer size must be >= 1");
  if (g.atom != Real(0)) throw ValidationError("inter-arrival mixture must not carry mass at zero");
  if (g.has_param(theta_N)) throw DistinctParameterError("outgoing erasure coincides with an input parameter");
  if (!(q >= Real(0) && q < Real(1))) throw ValidationError("downstream blocking must lie in [0,1)");
  NodeResult<Real> out;
  const Real tt = effective_theta(theta_N, q);
  out.D = dj_sequence(g, tt, m);
  out.P = embedded_matrix(g, m, tt, out.D);
  out.pi = embedded_stationary(out.P);
  out.blocking = out.pi[m - 1] * out.D[0];
  std::tie(out.starvation, out.starvation_norm) = starvation_mixture(g, out.pi, tt);
  // Departures must match accepted arrivals: the mean inter-departure time
  // alpha <f^X> + 1/(1 - theta_N) equals <g> (1 - q) / (1 - P_block).
  const Real target = g.mean() * (Real(1) - q) / (Real(1) - out.blocking);
  Real alpha = (target - Real(1) / (Real(1) - theta_N)) / out.starvation.mean();
  const Real slack(1e-9);
  if (alpha < -slack || alpha > Real(1) + slack)
    throw InconsistencyError("starvation weight " + std::to_string(to_double(alpha)) + " outside [0,1]");
  if (alpha < Real(0)) alpha = Real(0);
  if (alpha > Real(1)) alpha = Real(1);
  out.alpha = alpha;
  out.upsilon.atom = Real(1) - alpha;
  for (const auto& t : out.starvation.terms) out.upsilon.terms.push_back({alpha * t.p, t.theta});
  return out;
}

// Double-precision entry points for single-relay quantities.
std::vector<double> dj_distribution(const GeometricMixture& g_in, double theta_tilde, int j_max);

struct EmbeddedChain {
  std::vector<std::vector<double>> P;
  std::vector<double> pi;
};
EmbeddedChain embedded_chain(const GeometricMixture& g_in, int m, double theta_N, double q);
double blocking_prob(const GeometricMixture& g_in, int m, double theta_N, double q);
GeometricMixture starvation_distribution(const GeometricMixture& g_in, const std::vector<double>& pi, double theta_N,
                                         double q);
struct UpsilonResult {
  GeometricMixture upsilon;
  double alpha = 0.0;
};
UpsilonResult upsilon(const GeometricMixture& g_in, int m, double theta_N, double q);

struct Options {
  long max_iter = 10'000;
  double tol = 1e-10;
  Precision precision = Precision::Auto;
  bool auto_perturb = true;
  double perturbation = 1e-6;
  bool compact = true;
  // Starting blocking probabilities for relays (h-1 values); zeros when empty.
  std::vector<double> initial_pb;
};

struct DistSolution {
  std::vector<WideMixture> f;                    // inter-arrival mixture at each node; f[0] = G(eps_1)
  std::vector<double> pb;                        // h entries, pb[h-1] = 0
  std::vector<std::vector<double>> pi_embedded;  // per relay, occupancy 1..m just after arrivals
  std::vector<double> alpha;                     // per relay
  std::vector<double> starvation_norm;           // per relay
  long iterations = 0;
  double residual = 0.0;
  std::vector<double> eps_used;                  // after any perturbation
  unsigned digits = 0;                           // 0 for double
  std::vector<std::string> notes;
};

// Equal values are shifted by delta * (occurrence rank). Throws if the shift collides.
std::vector<double> perturb_equal(const std::vector<double>& eps, double delta, std::vector<std::string>* notes);

DistSolution solve(const NetworkSpec& spec, const Options& opts = {});

// 1 / <f_h>.
double capacity(const DistSolution& sol);

}  // namespace linenet::dbie
