#include "linenet/rbie.hpp"

#include <algorithm>
#include <cmath>

#include "linenet/errors.hpp"

namespace linenet::rbie {

LocalParams local_params(double r, double eps_next, double pb_next) {
  const double s = 1.0 - eps_next;
  return {r * (eps_next + s * pb_next), (1.0 - r) * (1.0 - pb_next) * s, r};
}

std::vector<double> occupancy_phi(double r, double eps_next, double pb_next, int m) {
  if (m < 1) throw ValidationError("buffer size must be >= 1");
  std::vector<double> phi(m + 1, 0.0);
  if (pb_next >= 1.0) {
    phi[m] = 1.0;
    return phi;
  }
  const auto p = local_params(r, eps_next, pb_next);
  if (p.alpha0 == 0.0) {
    phi[0] = 1.0;
    return phi;
  }
  if (p.beta == 0.0) {
    phi[m] = 1.0;
    return phi;
  }
  // Unnormalized weights w_0 = 1, w_k = (alpha0/beta) (alpha/beta)^(k-1); a
  // running product handles alpha == beta without the closed-form sum.
  const double ratio = p.alpha / p.beta;
  phi[0] = 1.0;
  double w = p.alpha0 / p.beta;
  double total = 1.0;
  for (int k = 1; k <= m; ++k) {
    phi[k] = w;
    total += w;
    w *= ratio;
  }
  for (double& v : phi) v /= total;
  return phi;
}

double step_pb(double r, double eps_next, double pb_next, int m) {
  return (eps_next + (1.0 - eps_next) * pb_next) * occupancy_phi(r, eps_next, pb_next, m)[m];
}

double step_rate(double r, double eps_next, double pb_next, int m) {
  return (1.0 - eps_next) * (1.0 - occupancy_phi(r, eps_next, pb_next, m)[0]);
}

RateSolution solve(const NetworkSpec& spec, const Options& opts) {
  spec.validate();
  const int h = spec.hops();
  RateSolution sol;
  sol.r.assign(h, 0.0);
  sol.pb.assign(h, opts.initial_pb);
  sol.pb[h - 1] = 0.0;
  sol.r[0] = spec.success(0);
  sol.phi.assign(h - 1, {});
  std::vector<double> r_prev(h), pb_prev(h);
  for (long c = 1; c <= opts.max_iter; ++c) {
    r_prev = sol.r;
    pb_prev = sol.pb;
    for (int j = 0; j < h - 1; ++j) {
      sol.phi[j] = occupancy_phi(sol.r[j], spec.eps[j + 1], pb_prev[j + 1], spec.buffers[j]);
      const double s = spec.success(j + 1);
      sol.r[j + 1] = s * (1.0 - sol.phi[j][0]);
      sol.pb[j] = (spec.eps[j + 1] + s * pb_prev[j + 1]) * sol.phi[j].back();
    }
    double change = 0.0;
    for (int i = 0; i < h; ++i)
      change = std::max({change, std::abs(sol.r[i] - r_prev[i]), std::abs(sol.pb[i] - pb_prev[i])});
    sol.iterations = c;
    sol.residual = change;
    if (opts.record_history) {
      sol.r_history.push_back(sol.r);
      sol.pb_history.push_back(sol.pb);
    }
    if (change <= opts.tol) return sol;
  }
  throw ConvergenceError("rate-based estimate did not converge", sol.residual);
}

double flow_residual(const RateSolution& sol) {
  const std::size_t h = sol.r.size();
  const double ref = sol.r[h - 1] * (1.0 - sol.pb[h - 1]);
  double worst = 0.0;
  for (std::size_t i = 0; i < h; ++i) worst = std::max(worst, std::abs(sol.r[i] * (1.0 - sol.pb[i]) - ref));
  return worst;
}

double capacity(const RateSolution& sol) {
  if (flow_residual(sol) > 1e-6) throw InconsistencyError("rate solution violates flow conservation");
  return sol.r.back() * (1.0 - sol.pb.back());
}

}  // namespace linenet::rbie
