#include "linenet/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>

#include "linenet/amc.hpp"
#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "linenet/rbie.hpp"
#include "linenet/sim.hpp"

namespace linenet {

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8g", *v);
  return buf;
}

template <class F>
std::optional<double> attempt(F&& f) {
  try {
    return f();
  } catch (const CapacityExceededError&) {
    return std::nullopt;
  }
}

// One row of the five-curve capacity sweeps.
void capacity_row(std::ostream& out, const std::string& prefix, const NetworkSpec& spec, const ReproduceOptions& o) {
  const auto cap = o.state_cap;
  const auto exact = attempt([&] { return emc::capacity_exact(spec, {}, cap); });
  const auto lower = attempt([&] { return amc::capacity_lower(spec, {}, cap); });
  const auto upper = attempt([&] { return amc::capacity_upper(spec, {}, cap); });
  const double rb = rbie::capacity(rbie::solve(spec));
  const double db = dbie::capacity(dbie::solve(spec));
  std::optional<double> simv, simse;
  if (o.sim_epochs > 0) {
    const auto st = sim::simulate_feedback(spec, o.sim_epochs, -1, o.seed);
    simv = st.throughput;
    simse = st.throughput_se;
  }
  out << prefix << ',' << cell(exact) << ',' << cell(lower) << ',' << cell(upper) << ',' << cell(rb) << ','
      << cell(db) << ',' << cell(simv) << ',' << cell(simse) << '\n';
}

const char* kCurves = "exact,lower,upper,rbie,dbie,sim,sim_se";

void capacity_vs_hops(const ReproduceOptions& o, std::ostream& out) {
  out << "h,eps,m," << kCurves << '\n';
  for (double e : {0.25, 0.5})
    for (int h = 2; h <= 10; ++h) {
      NetworkSpec spec(std::vector<double>(h, e), std::vector<int>(h - 1, 5));
      capacity_row(out, std::to_string(h) + ',' + cell(e) + ",5", spec, o);
    }
}

void capacity_vs_memory(const ReproduceOptions& o, std::ostream& out) {
  out << "m,eps,min_cut," << kCurves << '\n';
  for (double e : {0.25, 0.5})
    for (int m = 1; m <= 15; ++m) {
      NetworkSpec spec(std::vector<double>(5, e), std::vector<int>(4, m));
      capacity_row(out, std::to_string(m) + ',' + cell(e) + ',' + cell(1.0 - e), spec, o);
    }
}

void capacity_vs_eps(const ReproduceOptions& o, std::ostream& out) {
  out << "eps,min_cut,exact_loss_pct," << kCurves << '\n';
  for (int k = 1; k <= 10; ++k) {
    const double e = 0.05 * k;
    NetworkSpec spec(std::vector<double>(5, e), std::vector<int>(4, 5));
    const auto exact = attempt([&] { return emc::capacity_exact(spec, {}, o.state_cap); });
    std::optional<double> loss;
    if (exact) loss = 100.0 * (1.0 - e - *exact) / (1.0 - e);
    capacity_row(out, cell(e) + ',' + cell(1.0 - e) + ',' + cell(loss), spec, o);
  }
}

void delay_profiles(const ReproduceOptions& o, std::ostream& out) {
  out << "m,delay_epochs,dbie_prob,rbie_prob,sim_prob,dbie_cdf,rbie_cdf,sim_cdf\n";
  for (int m : {5, 10, 15}) {
    NetworkSpec spec(std::vector<double>(8, 0.25), std::vector<int>(7, m));
    const auto pd = delay::delay_profile(spec, delay::psi_rho_from_dbie(dbie::solve(spec), spec));
    const auto pr = delay::delay_profile(spec, delay::psi_rho_from_rbie(rbie::solve(spec), spec));
    std::vector<double> ps;
    if (o.sim_epochs > 0) {
      const auto st = sim::simulate_delay_fcfs(spec, o.sim_epochs, -1, o.seed);
      for (long c : st.delay_histogram) ps.push_back(static_cast<double>(c) / static_cast<double>(st.delay_count));
    }
    const std::size_t n = std::max({pd.pmf.size(), pr.pmf.size(), ps.size()});
    double cd = 0, cr = 0, cs = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = k < pd.pmf.size() ? pd.pmf[k] : 0.0;
      const double b = k < pr.pmf.size() ? pr.pmf[k] : 0.0;
      const double c = k < ps.size() ? ps[k] : 0.0;
      cd += a;
      cr += b;
      cs += c;
      out << m << ',' << k << ',' << cell(a) << ',' << cell(b) << ',' << (ps.empty() ? "" : cell(c)) << ','
          << cell(cd) << ',' << cell(cr) << ',' << (ps.empty() ? "" : cell(cs)) << '\n';
    }
  }
}

void node_sweep(const ReproduceOptions&, std::ostream& out) {
  const std::vector<double> eps{0.3, 0.5, 0.5, 0.2};
  out << "node,m,rbie_throughput,little_delay,node_delay_contribution\n";
  for (int node = 0; node < 3; ++node)
    for (int m = 1; m <= 20; ++m) {
      std::vector<int> buf(3, 20);
      buf[node] = m;
      NetworkSpec spec(eps, buf);
      const auto sol = rbie::solve(spec);
      const auto lit = delay::mean_delay_little(sol, spec);
      out << node + 1 << ',' << m << ',' << cell(rbie::capacity(sol)) << ',' << cell(lit.mean) << ','
          << cell(lit.contributions[node]) << '\n';
    }
}

void interarrival_density(const ReproduceOptions&, std::ostream& out) {
  const double tau = 0.001;
  const auto d = sim::discretize({{10.0, 3.0, 2.99}, {3, 3}, tau});
  const auto sol = dbie::solve(d.spec);
  const double rate = rbie::capacity(rbie::solve(d.spec)) / tau;
  const auto& f = sol.f.back();
  out << "t_seconds,dbie_density,rbie_exponential_density\n";
  for (long k = 1; k <= 3000; k += 5) {
    const double t = static_cast<double>(k) * tau;
    out << cell(t) << ',' << cell(to_double(f.pmf(k)) / tau) << ',' << cell(rate * std::exp(-rate * t)) << '\n';
  }
}

void tau_sweep(const ReproduceOptions& o, std::ostream& out) {
  const double lambda = 2.0;
  out << "m,tau,exact_rate,rbie_rate,dbie_rate\n";
  for (int m = 1; m <= 10; ++m)
    for (double frac : {0.25, 0.125, 0.0625, 1.0 / 64.0}) {
      const double tau = frac / lambda;
      const auto d = sim::discretize({std::vector<double>(4, lambda), std::vector<int>(3, m), tau});
      const auto exact = attempt([&] { return emc::capacity_exact(d.spec, {}, o.state_cap); });
      std::optional<double> er;
      if (exact) er = *exact * d.rate_factor;
      out << m << ',' << cell(tau) << ',' << cell(er) << ','
          << cell(rbie::capacity(rbie::solve(d.spec)) * d.rate_factor) << ','
          << cell(dbie::capacity(dbie::solve(d.spec)) * d.rate_factor) << '\n';
    }
}

using Writer = std::function<void(const ReproduceOptions&, std::ostream&)>;

const std::vector<std::pair<std::string, Writer>>& table() {
  static const std::vector<std::pair<std::string, Writer>> t{
      {"capacity-vs-hops", capacity_vs_hops},   {"capacity-vs-memory", capacity_vs_memory},
      {"capacity-vs-eps", capacity_vs_eps},     {"delay-profiles", delay_profiles},
      {"node-sweep", node_sweep},               {"interarrival-density", interarrival_density},
      {"tau-sweep", tau_sweep}};
  return t;
}

}  // namespace

std::vector<std::string> figure_catalogue() {
  std::vector<std::string> ids;
  for (const auto& [id, w] : table()) ids.push_back(id);
  return ids;
}

void reproduce(const std::string& figure_id, const ReproduceOptions& opts, std::ostream& out) {
  for (const auto& [id, w] : table())
    if (id == figure_id) return w(opts, out);
  std::string known;
  for (const auto& id : figure_catalogue()) known += (known.empty() ? "" : ", ") + id;
  throw ValidationError("unknown figure id '" + figure_id + "'; known: " + known);
}

}  // namespace linenet
