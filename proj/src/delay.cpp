#include "linenet/delay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linenet/errors.hpp"

namespace linenet::delay {

namespace {

double effective(double eps, double rho) { return eps + rho * (1.0 - eps); }

void check_psi(std::vector<double>& psi, int relay, std::vector<std::string>& notes) {
  const double s = std::accumulate(psi.begin(), psi.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-9)
    notes.push_back("psi at relay " + std::to_string(relay) + " sums to " + std::to_string(s));
}

}  // namespace

NodeDelayInputs psi_rho_from_rbie(const rbie::RateSolution& sol, const NetworkSpec& spec) {
  spec.validate();
  const int h = spec.hops();
  NodeDelayInputs in;
  in.source_eps_eff = effective(spec.eps[0], sol.pb[0]);
  for (int j = 0; j < h - 1; ++j) {
    const auto& phi = sol.phi[j];
    const int m = spec.buffers[j];
    const double rho = sol.pb[j + 1];
    const double e = effective(spec.eps[j + 1], rho);
    const double denom = 1.0 - phi[m] * e;
    std::vector<double> psi(m);
    psi[0] = (phi[0] + phi[1] * (1.0 - e)) / denom;
    for (int i = 1; i < m; ++i) psi[i] = (phi[i] * e + phi[i + 1] * (1.0 - e)) / denom;
    check_psi(psi, j, in.notes);
    in.psi.push_back(std::move(psi));
    in.rho.push_back(sol.pb[j]);
    in.eps_eff.push_back(e);
  }
  return in;
}

NodeDelayInputs psi_rho_from_dbie(const dbie::DistSolution& sol, const NetworkSpec& spec) {
  spec.validate();
  const int h = spec.hops();
  NodeDelayInputs in;
  in.source_eps_eff = effective(spec.eps[0], sol.pb[0]);
  for (int j = 0; j < h - 1; ++j) {
    const auto& pi = sol.pi_embedded[j];
    const int m = spec.buffers[j];
    const double pb = sol.pb[j];
    std::vector<double> psi(m);
    for (int i = 0; i + 1 < m; ++i) psi[i] = pi[i] / (1.0 - pb);
    psi[m - 1] = (pi[m - 1] - pb) / (1.0 - pb);
    for (int i = 0; i < m; ++i)
      if (psi[i] < -1e-9) throw InconsistencyError("negative waiting-position probability at relay " + std::to_string(j));
    check_psi(psi, j, in.notes);
    in.psi.push_back(std::move(psi));
    in.rho.push_back(pb);
    in.eps_eff.push_back(effective(spec.eps[j + 1], sol.pb[j + 1]));
  }
  return in;
}

std::vector<double> negative_binomial_pmf(int k, double eps_eff, std::size_t length) {
  std::vector<double> p(length, 0.0);
  if (k == 0) {
    if (length) p[0] = 1.0;
    return p;
  }
  if (static_cast<std::size_t>(k) >= length) return p;
  const double s = 1.0 - eps_eff;
  double v = std::pow(s, k);
  p[k] = v;
  for (std::size_t n = k; n + 1 < length; ++n) {
    v *= static_cast<double>(n) / static_cast<double>(n - k + 1) * eps_eff;
    p[n + 1] = v;
  }
  return p;
}

NodePmf node_delay(const std::vector<double>& psi, double eps_eff, double tail_tol) {
  if (psi.empty()) throw ValidationError("empty waiting-position distribution");
  if (!(eps_eff >= 0.0 && eps_eff < 1.0)) throw ValidationError("effective erasure must lie in [0,1)");
  const int m = static_cast<int>(psi.size());
  const double s = 1.0 - eps_eff;
  NodePmf out;
  for (int i = 0; i < m; ++i) {
    const double k = i + 1;
    const double mean_k = k / s;
    out.mean += psi[i] * mean_k;
    out.variance += psi[i] * (k * eps_eff / (s * s) + mean_k * mean_k);
  }
  out.variance -= out.mean * out.mean;

  // Running NB pmfs for k = 1..m, extended until the retained mass is within tail_tol of 1.
  std::vector<double> v(m, 0.0);
  const double total = std::accumulate(psi.begin(), psi.end(), 0.0);
  double acc = 0.0;
  out.pmf.push_back(0.0);
  const std::size_t limit = 50'000'000;
  for (std::size_t n = 1;; ++n) {
    double mass = 0.0;
    for (int i = 0; i < m; ++i) {
      const int k = i + 1;
      if (static_cast<int>(n) < k) break;
      if (static_cast<int>(n) == k)
        v[i] = std::pow(s, k);
      else
        v[i] *= static_cast<double>(n - 1) / static_cast<double>(n - k) * eps_eff;
      mass += psi[i] * v[i];
    }
    out.pmf.push_back(mass);
    acc += mass;
    if (static_cast<int>(n) >= m && total - acc < tail_tol) break;
    if (n > limit) throw NumericError("delay truncation budget exceeded");
  }
  out.dropped = std::max(0.0, total - acc);
  return out;
}

DelayProfile delay_profile(const NetworkSpec& spec, const NodeDelayInputs& in, const ProfileOptions& opts) {
  spec.validate();
  const int h = spec.hops();
  if (static_cast<int>(in.psi.size()) != h - 1) throw ValidationError("delay inputs do not match the spec");
  DelayProfile out;
  std::vector<NodePmf> parts;
  if (opts.include_source) parts.push_back(node_delay({1.0}, in.source_eps_eff, opts.factor_tail));
  for (int j = 0; j < h - 1; ++j) {
    parts.push_back(node_delay(in.psi[j], in.eps_eff[j], opts.factor_tail));
    out.node_means.push_back(parts.back().mean);
  }
  out.pmf = {1.0};
  for (const auto& p : parts) {
    std::vector<double> next(out.pmf.size() + p.pmf.size() - 1, 0.0);
    for (std::size_t a = 0; a < out.pmf.size(); ++a) {
      if (out.pmf[a] == 0.0) continue;
      for (std::size_t b = 0; b < p.pmf.size(); ++b) next[a + b] += out.pmf[a] * p.pmf[b];
    }
    out.pmf.swap(next);
    out.mean += p.mean;
    out.variance += p.variance;
  }
  const double kept = std::accumulate(out.pmf.begin(), out.pmf.end(), 0.0);
  out.tail_mass_dropped = std::max(0.0, 1.0 - kept);
  if (out.tail_mass_dropped > opts.max_dropped) throw NumericError("delay truncation budget exceeded");
  return out;
}

LittleResult mean_delay_little(const rbie::RateSolution& sol, const NetworkSpec& spec) {
  spec.validate();
  LittleResult out;
  const auto& last = sol.phi.back();
  out.capacity = spec.success(spec.hops() - 1) * (1.0 - last[0]);
  for (const auto& phi : sol.phi) {
    double occ = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) occ += static_cast<double>(k) * phi[k];
    out.contributions.push_back(out.capacity > 0.0 ? occ / out.capacity : 0.0);
    out.mean += out.contributions.back();
  }
  return out;
}

}  // namespace linenet::delay
