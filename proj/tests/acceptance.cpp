// One PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "linenet/allocate.hpp"
#include "linenet/amc.hpp"
#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/emc.hpp"
#include "linenet/mixture.hpp"
#include "linenet/netcod.hpp"
#include "linenet/rbie.hpp"
#include "linenet/sim.hpp"
#include "oracles.hpp"

using namespace linenet;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void require(bool c, const std::string& what) {
    if (!c) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

Check criterion1() {
  Check c;
  const NetworkSpec spec({0.5, 0.4999, 0.4998, 0.4}, {5, 5, 5});
  rbie::RateSolution r;
  dbie::DistSolution d;
  double exact = 0.0;
  const double tr = timed([&] { r = rbie::solve(spec); });
  const double td = timed([&] { d = dbie::solve(spec); });
  const double te = timed([&] { exact = emc::capacity_exact(spec); });
  const std::vector<double> r_ref{0.5, 0.46797, 0.43958, 0.43484}, pb_ref{0.13031, 0.07078, 0.01076, 0.0};
  for (int i = 0; i < 4; ++i) {
    c.require(std::abs(r.r[i] - r_ref[i]) <= 2e-5, "r[" + std::to_string(i) + "]=" + fmt(r.r[i]));
    c.require(std::abs(r.pb[i] - pb_ref[i]) <= 2e-5, "pb[" + std::to_string(i) + "]=" + fmt(r.pb[i]));
  }
  const double cr = rbie::capacity(r), cd = dbie::capacity(d);
  c.require(std::abs(cr - 0.43484) <= 2e-5, "rbie");
  c.require(std::abs(cd - 0.435089) <= 1e-4, "dbie");
  c.require(std::abs(exact - 0.43501) <= 1e-3, "exact");
  c.require(tr < 5 && td < 5 && te < 5, "time");
  c.detail << " rbie=" << fmt(cr) << " dbie=" << fmt(cd) << " (" << d.digits << " digits) exact=" << fmt(exact)
           << " times=" << fmt(tr, 3) << "/" << fmt(td, 3) << "/" << fmt(te, 3) << "s";
  return c;
}

Check criterion2() {
  Check c;
  CounterRng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 2, 1, 10);
    const auto b = amc::bounds(spec, true);
    const double ex = *b.exact;
    for (double v : {rbie::capacity(rbie::solve(spec)), dbie::capacity(dbie::solve(spec)), b.lower, *b.upper})
      worst = std::max(worst, std::abs(v - ex));
  }
  c.require(worst <= 1e-6, "max deviation");
  c.detail << " max |exact - estimate or bound| = " << worst << " over 20 specs";
  return c;
}

Check criterion3() {
  Check c;
  CounterRng rng(2025);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    const auto spec = oracle::random_spec(rng, 3, 4, 1, 4);
    const auto b = amc::bounds(spec, true);
    if (!(b.lower <= *b.exact + 1e-9 && *b.exact <= *b.upper + 1e-9)) ++violations;
  }
  c.require(violations == 0, "violations");
  c.detail << " violations=" << violations << " of 50";
  return c;
}

Check criterion4() {
  Check c;
  CounterRng rng(2026);
  int bound_fail = 0, upper_fail = 0, mutation_caught = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 6, 1, 8);
    const std::uint64_t seed = 10'000 + t;
    if (!amc::coupled_boundedness_check(spec, seed, 100'000)) ++bound_fail;
    if (!amc::coupled_upper_check(spec, seed, 100'000)) ++upper_fail;
    if (!amc::coupled_upper_check(spec, seed, 100'000, amc::UpperBuffers::Unmodified)) ++mutation_caught;
  }
  c.require(bound_fail == 0, "boundedness");
  c.require(upper_fail == 0, "upper");
  c.require(mutation_caught >= 1, "mutation undetected");
  c.detail << " boundedness failures=" << bound_fail << " upper failures=" << upper_fail
           << " mutation detected on " << mutation_caught << " of 1000 pairs";
  return c;
}

Check criterion5() {
  Check c;
  const double analytic_ref[] = {30.09, 55.22, 81.68}, sim_ref[] = {30.22, 55.18, 81.29};
  int k = 0;
  for (int m : {5, 10, 15}) {
    const NetworkSpec spec(std::vector<double>(8, 0.25), std::vector<int>(7, m));
    const auto d = dbie::solve(spec);
    const double prof = delay::delay_profile(spec, delay::psi_rho_from_dbie(d, spec)).mean;
    const double little = delay::mean_delay_little(rbie::solve(spec), spec).mean;
    const auto st = sim::simulate_delay_fcfs(spec, 1'000'000, -1, 1);
    c.require(std::abs(prof - analytic_ref[k]) <= 0.05, "analytic m=" + std::to_string(m));
    c.require(std::abs(st.delay_mean - sim_ref[k]) <= 0.5, "simulated m=" + std::to_string(m));
    c.require(std::abs(prof - little) <= 0.02 * little, "little m=" + std::to_string(m));
    c.detail << " m=" << m << ": profile=" << fmt(prof, 3) << " sim=" << fmt(st.delay_mean, 3) << "+-"
             << fmt(st.delay_mean_se, 3) << " little=" << fmt(little, 3) << ";";
    ++k;
  }
  return c;
}

Check criterion6() {
  Check c;
  const std::vector<double> lambdas{10, 3, 2.99};
  const std::vector<int> buffers{3, 3};
  const double ref = 2.2467;
  const auto d = sim::discretize({lambdas, buffers, 0.001});
  const double ex = emc::capacity_exact(d.spec) * d.rate_factor;
  const double db = dbie::capacity(dbie::solve(d.spec)) * d.rate_factor;
  const double rb = rbie::capacity(rbie::solve(d.spec)) * d.rate_factor;
  c.require(std::abs(ex - ref) <= 0.005 * ref, "exact");
  c.require(std::abs(db - 2.2447) <= 0.002, "dbie");
  c.require(std::abs(rb - 2.2413) <= 0.002, "rbie");
  double prev = 1e300;
  c.detail << " exact=" << fmt(ex, 5) << " dbie=" << fmt(db, 5) << " rbie=" << fmt(rb, 5) << " errors:";
  for (double f : {4.0, 8.0, 16.0, 64.0}) {
    const auto s = sim::discretize({lambdas, buffers, 1.0 / (f * 10.0)});
    const double err = std::abs(emc::capacity_exact(s.spec) * s.rate_factor - ref);
    c.require(err <= prev + 1e-12, "trend at 1/" + fmt(f, 0));
    c.detail << " " << fmt(err, 5);
    prev = err;
  }
  return c;
}

Check criterion7() {
  Check c;
  alloc::Options o;
  o.budget = 30;
  alloc::AllocationResult thr, del, big;
  const double t1 = timed([&] { thr = alloc::allocate({0.3, 0.5, 0.5, 0.2}, o); });
  o.objective = alloc::Objective::MinDelay;
  o.floor = 0.485;
  const double t2 = timed([&] { del = alloc::allocate({0.3, 0.5, 0.5, 0.2}, o); });
  alloc::Options o3;
  o3.budget = 60;
  const double t3 = timed([&] { big = alloc::allocate({0.51, 0.50, 0.49, 0.48}, o3); });
  c.require(thr.best.buffers == std::vector<int>{5, 21, 4}, "max-throughput vector");
  c.require(std::abs(thr.best.throughput - 0.4871) <= 1e-4, "max-throughput estimate");
  c.require(del.best.buffers == std::vector<int>{4, 20, 6}, "min-delay vector");
  c.require(std::abs(del.best.delay - 28.46) <= 0.1, "min-delay delay");
  c.require(big.best.buffers == std::vector<int>{27, 20, 13}, "budget-60 vector");
  c.require(t1 < 60 && t2 < 60 && t3 < 60, "time");
  auto vec = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return "(" + s + ")";
  };
  c.detail << " " << vec(thr.best.buffers) << " " << fmt(thr.best.throughput, 5) << "; " << vec(del.best.buffers)
           << " delay " << fmt(del.best.delay, 3) << "; " << vec(big.best.buffers) << "; times " << fmt(t1, 2)
           << "/" << fmt(t2, 2) << "/" << fmt(t3, 2) << "s";
  return c;
}

Check criterion8() {
  Check c;
  const NetworkSpec spec({0.5, 0.5, 0.5}, {2, 2});
  const double exact = emc::capacity_exact(spec);
  const auto big = netcod::simulate_no_feedback(spec, {65536}, 1'000'000, -1, 1);
  const auto small = netcod::simulate_no_feedback(spec, {2}, 1'000'000, -1, 1);
  const double z = (big.rate - small.rate) / std::hypot(big.rate_se, small.rate_se);
  c.require(std::abs(big.rate - exact) <= 1e-2, "limit");
  c.require(z > 3.0, "field-size gap");
  c.detail << " exact=" << fmt(exact) << " q=65536: " << fmt(big.rate) << " q=2: " << fmt(small.rate)
           << " z=" << fmt(z, 2);
  return c;
}

Check criterion9() {
  Check c;
  CounterRng rng(2027);

  int lemma_fail = 0;
  for (int t = 0; t < 50; ++t) {
    try {
      emc::verify_lemma1(oracle::random_spec(rng, 2, 4, 1, 4));
    } catch (const std::exception&) {
      ++lemma_fail;
    }
  }
  c.require(lemma_fail == 0, "lemma 1");

  double conv_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto mix = [&] {
      GeometricMixture f;
      double total = 0.0;
      const int terms = 1 + static_cast<int>(rng.below(3));
      for (int l = 0; l < terms; ++l) {
        const double p = rng.uniform() - 0.3;
        f.terms.push_back({p, 0.05 + 0.9 * rng.uniform()});
        total += p;
      }
      for (auto& term : f.terms) term.p /= total;
      return f;
    };
    const auto f = mix(), g = mix();
    const auto conv = gm_convolve(f, g);
    for (int k = 2; k <= 200; ++k) {
      double direct = 0.0;
      for (int i = 0; i <= k; ++i) direct += f.pmf(i) * g.pmf(k - i);
      conv_worst = std::max(conv_worst, std::abs(conv.pmf(k) - direct));
    }
  }
  c.require(conv_worst <= 1e-10, "convolution");

  int queue_fail = 0;
  struct Case {
    std::vector<double> p, theta;
    int m;
    double theta_N, q;
  };
  const std::vector<Case> cases{{{1.0}, {0.5}, 2, 0.45, 0.1},
                                {{0.6, 0.4}, {0.3, 0.7}, 3, 0.5, 0.2},
                                {{0.5, 0.5}, {0.2, 0.6}, 2, 0.35, 0.0}};
  std::uint64_t seed = 100;
  for (const auto& qc : cases) {
    GeometricMixture g;
    for (std::size_t l = 0; l < qc.p.size(); ++l) g.terms.push_back({qc.p[l], qc.theta[l]});
    const double tt = dbie::effective_theta(qc.theta_N, qc.q);
    const auto mc = oracle::simulate_queue(qc.p, qc.theta, qc.m, tt, 2'000'000, seed++);
    auto joint = [&](const std::vector<double>& model, const std::vector<double>& est, const std::vector<double>& se) {
      double z2 = 0.0;
      int n = 0;
      for (std::size_t k = 0; k < model.size(); ++k) {
        if (se[k] <= 0.0) continue;
        z2 += (model[k] - est[k]) * (model[k] - est[k]) / (se[k] * se[k]);
        ++n;
      }
      if (z2 > oracle::chi2_critical(n, 0.0027)) ++queue_fail;
    };
    auto D = dbie::dj_distribution(g, tt, 11);
    D.pop_back();
    joint(D, mc.D, mc.D_se);
    const auto ch = dbie::embedded_chain(g, qc.m, qc.theta_N, qc.q);
    joint(ch.pi, mc.pi, mc.pi_se);
    if (std::abs(dbie::blocking_prob(g, qc.m, qc.theta_N, qc.q) - mc.blocking) > 3 * mc.blocking_se) ++queue_fail;
    const auto fx = dbie::starvation_distribution(g, ch.pi, qc.theta_N, qc.q);
    std::vector<double> gap(10);
    for (int k = 1; k <= 10; ++k) gap[k - 1] = fx.pmf(k);
    joint(gap, mc.gap, mc.gap_se);
  }
  c.require(queue_fail == 0, "queue oracle");

  int chi_fail = 0;
  for (int t = 0; t < 10; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 4, 1, 3);
    sim::Options o;
    o.epochs = 2'000'000;
    o.seed = 700 + t;
    o.joint_histogram = true;
    o.sample_stride = 50;
    const auto st = sim::simulate(spec, o);
    const auto chi = oracle::chi2(st.joint_histogram, emc::solve(spec).stationary.pi);
    if (chi.stat > oracle::chi2_critical(chi.dof, 0.001)) ++chi_fail;
  }
  c.require(chi_fail == 0, "occupancy chi-square");

  int bijection_fail = 0;
  for (int t = 0; t < 50; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 5, 1, 6);
    for (std::uint64_t k = 0; k < spec.state_count(); ++k)
      if (state_index(index_state(k, spec), spec) != k) ++bijection_fail;
  }
  c.require(bijection_fail == 0, "state index");

  double flow_worst = 0.0;
  for (int t = 0; t < 200; ++t) flow_worst = std::max(flow_worst, rbie::flow_residual(rbie::solve(oracle::random_spec(rng, 2, 10, 1, 20))));
  c.require(flow_worst <= 1e-9, "flow residual");

  c.detail << " lemma1 failures=" << lemma_fail << " convolution max err=" << conv_worst
           << " queue oracle failures=" << queue_fail << " chi2 failures=" << chi_fail
           << " bijection failures=" << bijection_fail << " max flow residual=" << flow_worst;
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"4-hop reference network", criterion1}, {"two-hop collapse", criterion2},
      {"bounds sandwich", criterion3},         {"coupling checks", criterion4},
      {"delay reproduction", criterion5},      {"continuous-time bridge", criterion6},
      {"buffer allocation", criterion7},       {"network coding limit", criterion8},
      {"property suites", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " exception: " << e.what();
    }
    failed += !c.ok;
    std::printf("%s criterion %zu (%s):%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
