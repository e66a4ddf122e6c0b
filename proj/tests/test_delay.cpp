#include <doctest.h>

#include <numeric>
#include <sstream>

#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/emc.hpp"
#include "linenet/rbie.hpp"
#include "linenet/report.hpp"
#include "oracles.hpp"

using namespace linenet;

namespace {

std::vector<double> geometric_pmf(double eps, std::size_t n) {
  std::vector<double> p(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) p[k] = (1 - eps) * std::pow(eps, static_cast<double>(k - 1));
  return p;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double pmf_mean(const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += static_cast<double>(k) * p[k];
  return s;
}

NetworkSpec eight_hop(int m) { return NetworkSpec(std::vector<double>(8, 0.25), std::vector<int>(7, m)); }

}  // namespace

TEST_CASE("negative binomial pmf equals repeated geometric convolution") {
  const std::size_t n = 120;
  for (double e : {0.2, 0.5, 0.8}) {
    auto direct = geometric_pmf(e, n);
    for (int k = 1; k <= 6; ++k) {
      const auto nb = delay::negative_binomial_pmf(k, e, n);
      for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(nb[t] - direct[t]) <= 1e-13);
      direct = convolve(direct, geometric_pmf(e, n), n);
    }
  }
}

TEST_CASE("node delay with known waiting positions") {
  const auto one = delay::node_delay({1.0}, 0.5);
  CHECK(one.mean == doctest::Approx(2.0));
  CHECK(one.variance == doctest::Approx(2.0));
  for (int k = 1; k <= 10; ++k) CHECK(one.pmf[k] == doctest::Approx(std::pow(0.5, k)));
  const auto two = delay::node_delay({0.5, 0.5}, 0.5);
  CHECK(two.mean == doctest::Approx(3.0));
  CHECK(pmf_mean(two.pmf) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(two.dropped <= 1e-9);
}

TEST_CASE("waiting-position distributions are proper") {
  CounterRng rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 6, 1, 8, 0.1, 0.7);
    INFO(spec.describe());
    const auto ir = delay::psi_rho_from_rbie(rbie::solve(spec), spec);
    const auto id = delay::psi_rho_from_dbie(dbie::solve(spec), spec);
    CHECK(ir.notes.empty());
    CHECK(id.notes.empty());
    for (const auto* in : {&ir, &id}) {
      for (std::size_t j = 0; j < in->psi.size(); ++j) {
        CHECK(std::accumulate(in->psi[j].begin(), in->psi[j].end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(in->rho[j] >= 0.0);
        CHECK(in->rho[j] < 1.0);
      }
    }
  }
  const NetworkSpec single({0.4, 0.3, 0.2}, {1, 1});
  for (const auto& psi : delay::psi_rho_from_rbie(rbie::solve(single), single).psi)
    CHECK(psi[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& psi : delay::psi_rho_from_dbie(dbie::solve(single), single).psi)
    CHECK(psi[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two hops: one relay, closed-form occupancy") {
  const NetworkSpec spec({0.5, 0.5}, {2});
  const auto sol = rbie::solve(spec);
  const auto lit = delay::mean_delay_little(sol, spec);
  CHECK(lit.capacity == doctest::Approx(0.4));
  CHECK(lit.mean == doctest::Approx(3.0));
  const auto in = delay::psi_rho_from_rbie(sol, spec);
  const auto prof = delay::delay_profile(spec, in);
  const auto node = delay::node_delay(in.psi[0], in.eps_eff[0]);
  CHECK(prof.mean == doctest::Approx(node.mean));
  for (std::size_t k = 0; k < std::min(prof.pmf.size(), node.pmf.size()); ++k) CHECK(prof.pmf[k] == doctest::Approx(node.pmf[k]));
}

TEST_CASE("one-slot relay on two hops: delay is geometric in the last link") {
  const NetworkSpec spec({0.3, 0.6}, {1});
  const auto prof = delay::delay_profile(spec, delay::psi_rho_from_dbie(dbie::solve(spec), spec));
  CHECK(prof.mean == doctest::Approx(1.0 / 0.4));
  for (int k = 1; k <= 20; ++k) CHECK(prof.pmf[k] == doctest::Approx(0.4 * std::pow(0.6, k - 1)).epsilon(1e-10));
}

TEST_CASE("starved source: little delay") {
  const NetworkSpec spec({0.999, 0.5, 0.5}, {3, 3});
  const auto lit = delay::mean_delay_little(rbie::solve(spec), spec);
  for (double c : lit.contributions) CHECK(c < 2.5);
}

TEST_CASE("profile is a proper pmf and its mean matches the per-node sum") {
  const auto spec = eight_hop(5);
  const auto prof = delay::delay_profile(spec, delay::psi_rho_from_dbie(dbie::solve(spec), spec));
  const double mass = std::accumulate(prof.pmf.begin(), prof.pmf.end(), 0.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(prof.tail_mass_dropped <= 1e-6);
  CHECK(pmf_mean(prof.pmf) == doctest::Approx(prof.mean).epsilon(1e-5));
  CHECK(std::accumulate(prof.node_means.begin(), prof.node_means.end(), 0.0) == doctest::Approx(prof.mean));
}

TEST_CASE("larger buffers: larger mean and variance") {
  double mean = 0.0, var = 0.0;
  for (int m : {5, 10, 15}) {
    const auto spec = eight_hop(m);
    const auto prof = delay::delay_profile(spec, delay::psi_rho_from_dbie(dbie::solve(spec), spec));
    CHECK(prof.mean > mean);
    CHECK(prof.variance > var);
    mean = prof.mean;
    var = prof.variance;
  }
}

TEST_CASE("profile mean and Little's-law mean agree within 2%") {
  for (int m : {5, 10, 15}) {
    const auto spec = eight_hop(m);
    const auto r = rbie::solve(spec);
    const double little = delay::mean_delay_little(r, spec).mean;
    const double prof = delay::delay_profile(spec, delay::psi_rho_from_dbie(dbie::solve(spec), spec)).mean;
    INFO("m=" << m << " little=" << little << " profile=" << prof);
    CHECK(std::abs(prof - little) <= 0.02 * little);
  }
}

TEST_CASE("rate-based Little's law against the exact occupancy") {
  const NetworkSpec spec({0.3, 0.4, 0.35}, {3, 4});
  const auto ex = emc::solve(spec);
  double occ = 0.0;
  for (std::size_t k = 0; k < ex.stationary.pi.size(); ++k)
    for (int v : index_state(k, spec)) occ += v * ex.stationary.pi[k];
  const double exact = occ / ex.capacity;
  CHECK(delay::mean_delay_little(rbie::solve(spec), spec).mean == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("source wait adds a geometric factor") {
  const auto spec = eight_hop(5);
  const auto in = delay::psi_rho_from_dbie(dbie::solve(spec), spec);
  delay::ProfileOptions with;
  with.include_source = true;
  const double added = delay::delay_profile(spec, in, with).mean - delay::delay_profile(spec, in).mean;
  CHECK(added == doctest::Approx(1.0 / (1.0 - in.source_eps_eff)));
}

TEST_CASE("pmf CSV columns") {
  std::ostringstream os;
  write_pmf_csv(os, {0.0, 0.5, 0.25, 0.25});
  const auto s = os.str();
  CHECK(s.rfind("delay_epochs,probability,cumulative\n", 0) == 0);
  CHECK(s.find("3,0.25,1") != std::string::npos);
}
