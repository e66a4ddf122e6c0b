#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "linenet/allocate.hpp"
#include "linenet/amc.hpp"
#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "linenet/netcod.hpp"
#include "linenet/rbie.hpp"
#include "linenet/report.hpp"
#include "linenet/reproduce.hpp"
#include "linenet/sim.hpp"

using namespace linenet;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kConvergence = 3, kSizeCap = 4 };

struct Config {
  std::string spec;
  double tol = 0.0;  // 0: module default
  long max_iter = 0;
  std::uint64_t seed = 1;
  long epochs = 1'000'000;
  long warmup = -1;
  std::string format = "json";
  std::string out;
  std::uint64_t state_cap = emc::kDefaultStateCap;

  std::string precision = "auto";
  bool no_perturb = false;
  double delta = 1e-6;
  std::string pmf_csv;
  std::string dump_matrix;
  std::string source = "dbie";
  bool include_source = false;
  bool track_delay = false;
  std::uint32_t q = 65536;
  bool compare = false;
  std::vector<double> lambdas;
  std::vector<int> buffers;
  double tau = 0.0;
  std::vector<double> eps;
  int budget = 0;
  std::string objective = "max-throughput";
  double floor = 0.0;
  std::string method = "auto";
  bool no_rescore = false;
  std::string figure;
  bool list = false;
};

json config_json(const std::string& cmd, const Config& c) {
  json j{{"subcommand", cmd}, {"seed", c.seed}, {"format", c.format}};
  if (!c.spec.empty()) j["spec"] = c.spec;
  if (c.tol > 0) j["tol"] = c.tol;
  if (c.max_iter > 0) j["max_iter"] = c.max_iter;
  if (cmd == "simulate" || cmd == "netcod") {
    j["epochs"] = c.epochs;
    j["warmup"] = c.warmup;
  }
  if (cmd == "dbie" || cmd == "delay") {
    j["precision"] = c.precision;
    j["auto_perturb"] = !c.no_perturb;
    j["perturbation"] = c.delta;
  }
  if (cmd == "delay") {
    j["source"] = c.source;
    j["include_source"] = c.include_source;
  }
  if (cmd == "netcod") j["q"] = c.q;
  if (cmd == "continuous") {
    j["lambdas"] = c.lambdas;
    j["buffers"] = c.buffers;
    j["tau"] = c.tau;
  }
  if (cmd == "allocate") {
    j["eps"] = c.eps;
    j["budget"] = c.budget;
    j["objective"] = c.objective;
    j["floor"] = c.floor;
    j["method"] = c.method;
    j["rescore"] = !c.no_rescore;
  }
  if (cmd == "exact" || cmd == "bounds") j["state_cap"] = c.state_cap;
  return j;
}

std::ostream& output(const Config& c, std::ofstream& file) {
  if (c.out.empty()) return std::cout;
  file.open(c.out);
  if (!file) throw ValidationError("cannot open output file '" + c.out + "'");
  return file;
}

void emit(const std::string& cmd, const Config& c, json result) {
  json doc{{"tool", version()}, {"config", config_json(cmd, c)}, {"result", std::move(result)}};
  std::ofstream file;
  output(c, file) << doc.dump(2) << '\n';
}

StationaryOptions stationary_opts(const Config& c) {
  StationaryOptions o;
  if (c.tol > 0) o.tol = c.tol;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  return o;
}

rbie::Options rbie_opts(const Config& c) {
  rbie::Options o;
  if (c.tol > 0) o.tol = c.tol;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  return o;
}

dbie::Options dbie_opts(const Config& c) {
  dbie::Options o;
  if (c.tol > 0) o.tol = c.tol;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  o.precision = parse_precision(c.precision);
  o.auto_perturb = !c.no_perturb;
  o.perturbation = c.delta;
  return o;
}

void cmd_exact(const Config& c) {
  const auto spec = load_spec(c.spec);
  const auto P = emc::build(spec, c.state_cap);
  if (!c.dump_matrix.empty()) {
    std::ofstream f(c.dump_matrix);
    P.write_csv(f);
  }
  const auto st = stationary(P, stationary_opts(c));
  const double cap = emc::capacity_from_stationary(spec, st.pi);
  const auto flows = emc::link_flows(spec, st.pi);
  if (c.format == "csv") {
    std::ofstream file;
    auto& os = output(c, file);
    os.precision(17);
    os << "state_index,probability\n";
    for (std::size_t k = 0; k < st.pi.size(); ++k) os << k << ',' << st.pi[k] << '\n';
    return;
  }
  emit("exact", c,
       json{{"spec", to_json(spec)},
            {"states", P.dimension},
            {"capacity", cap},
            {"link_flows", flows},
            {"solver", st.method},
            {"iterations", st.iterations},
            {"residual", st.residual}});
}

void cmd_bounds(const Config& c) {
  const auto spec = load_spec(c.spec);
  const auto b = amc::bounds(spec, true, stationary_opts(c), c.state_cap);
  emit("bounds", c, json{{"spec", to_json(spec)}, {"bounds", to_json(b)}});
}

void cmd_rbie(const Config& c) {
  const auto spec = load_spec(c.spec);
  const auto sol = rbie::solve(spec, rbie_opts(c));
  json r = to_json(sol);
  r["capacity"] = rbie::capacity(sol);
  emit("rbie", c, json{{"spec", to_json(spec)}, {"solution", r}});
}

void cmd_dbie(const Config& c) {
  const auto spec = load_spec(c.spec);
  const auto sol = dbie::solve(spec, dbie_opts(c));
  for (const auto& n : sol.notes) std::cerr << "note: " << n << '\n';
  if (!c.pmf_csv.empty()) {
    std::ofstream f(c.pmf_csv);
    write_mixture_pmf_csv(f, sol.f.back());
  }
  json r = to_json(sol);
  r["capacity"] = dbie::capacity(sol);
  emit("dbie", c, json{{"spec", to_json(spec)}, {"solution", r}});
}

void cmd_delay(const Config& c) {
  const auto spec = load_spec(c.spec);
  delay::NodeDelayInputs in;
  const auto rsol = rbie::solve(spec, rbie_opts(c));
  if (c.source == "rbie") {
    in = delay::psi_rho_from_rbie(rsol, spec);
  } else if (c.source == "dbie") {
    in = delay::psi_rho_from_dbie(dbie::solve(spec, dbie_opts(c)), spec);
  } else {
    throw ValidationError("--source must be rbie or dbie");
  }
  for (const auto& n : in.notes) std::cerr << "note: " << n << '\n';
  delay::ProfileOptions po;
  po.include_source = c.include_source;
  const auto prof = delay::delay_profile(spec, in, po);
  if (c.format == "csv") {
    std::ofstream file;
    write_pmf_csv(output(c, file), prof.pmf);
    return;
  }
  const auto lit = delay::mean_delay_little(rsol, spec);
  emit("delay", c,
       json{{"spec", to_json(spec)},
            {"profile", to_json(prof, false)},
            {"little", json{{"mean", lit.mean}, {"contributions", lit.contributions}, {"capacity", lit.capacity}}}});
}

void cmd_simulate(const Config& c) {
  const auto spec = load_spec(c.spec);
  sim::Options o;
  o.epochs = c.epochs;
  o.warmup = c.warmup;
  o.seed = c.seed;
  o.track_delay = c.track_delay;
  const auto st = sim::simulate(spec, o);
  if (c.format == "csv") {
    std::ofstream file;
    auto& os = output(c, file);
    if (c.track_delay) {
      os << "delay_epochs,count\n";
      for (std::size_t k = 0; k < st.delay_histogram.size(); ++k) os << k << ',' << st.delay_histogram[k] << '\n';
    } else {
      os << "relay,occupancy,count\n";
      for (std::size_t j = 0; j < st.occupancy_histograms.size(); ++j)
        for (std::size_t k = 0; k < st.occupancy_histograms[j].size(); ++k)
          os << j << ',' << k << ',' << st.occupancy_histograms[j][k] << '\n';
    }
    return;
  }
  emit("simulate", c, json{{"spec", to_json(spec)}, {"stats", to_json(st)}});
}

void cmd_netcod(const Config& c) {
  const auto spec = load_spec(c.spec);
  if (c.format == "csv") {
    std::ofstream file;
    auto& os = output(c, file);
    os << "q,rate,rate_se\n";
    for (std::uint32_t q : {2u, 16u, 256u, 65536u}) {
      const auto st = netcod::simulate_no_feedback(spec, {q}, c.epochs, c.warmup, c.seed);
      os << q << ',' << st.rate << ',' << st.rate_se << '\n';
    }
    return;
  }
  const auto st = netcod::simulate_no_feedback(spec, {c.q}, c.epochs, c.warmup, c.seed);
  json r{{"spec", to_json(spec)}, {"stats", to_json(st)}};
  if (c.compare) {
    const auto cmp = netcod::eta_transition_comparison(spec, {c.q}, c.epochs, c.seed);
    r["transition_comparison"] = json{{"distance", cmp.distance},
                                      {"rows_visited", cmp.rows_visited},
                                      {"min_row_count", cmp.min_row_count},
                                      {"transitions", cmp.transitions}};
  }
  emit("netcod", c, r);
}

void cmd_continuous(const Config& c) {
  const auto d = sim::discretize({c.lambdas, c.buffers, c.tau});
  json r{{"spec", to_json(d.spec)}, {"rate_factor", d.rate_factor}};
  try {
    r["exact"] = emc::capacity_exact(d.spec, stationary_opts(c), c.state_cap) * d.rate_factor;
  } catch (const CapacityExceededError&) {
    r["exact"] = nullptr;
  }
  r["rbie"] = rbie::capacity(rbie::solve(d.spec, rbie_opts(c))) * d.rate_factor;
  r["dbie"] = dbie::capacity(dbie::solve(d.spec, dbie_opts(c))) * d.rate_factor;
  emit("continuous", c, r);
}

void cmd_allocate(const Config& c) {
  std::vector<double> eps = c.eps;
  if (eps.empty() && !c.spec.empty()) eps = load_spec(c.spec).eps;
  if (eps.empty()) throw ValidationError("allocate needs --eps or --spec");
  alloc::Options o;
  o.objective = alloc::parse_objective(c.objective);
  o.budget = c.budget;
  o.floor = c.floor;
  o.method = alloc::parse_method(c.method);
  o.rescore = !c.no_rescore;
  const auto res = alloc::allocate(eps, o);
  if (c.format == "csv") {
    std::ofstream file;
    auto& os = output(c, file);
    os.precision(10);
    os << "rank,buffers,throughput,mean_delay,dbie,exact\n";
    for (std::size_t i = 0; i < res.top.size(); ++i) {
      const auto& t = res.top[i];
      os << i + 1 << ',';
      for (std::size_t k = 0; k < t.buffers.size(); ++k) os << (k ? " " : "") << t.buffers[k];
      os << ',' << t.throughput << ',' << t.delay << ',';
      if (t.dbie) os << *t.dbie;
      os << ',';
      if (t.exact) os << *t.exact;
      os << '\n';
    }
    return;
  }
  emit("allocate", c, to_json(res));
}

void cmd_reproduce(const Config& c) {
  if (c.list) {
    for (const auto& id : figure_catalogue()) std::cout << id << '\n';
    return;
  }
  ReproduceOptions o;
  o.sim_epochs = c.epochs;
  o.seed = c.seed;
  std::ofstream file;
  reproduce(c.figure, o, output(c, file));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput, bounds, estimates and delay for finite-buffer erasure line networks"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s, bool needs_spec) {
    auto* opt = s->add_option("--spec", c.spec, "network spec JSON file, or inline JSON");
    if (needs_spec) opt->required();
    s->add_option("--tol", c.tol, "convergence tolerance")->check(CLI::PositiveNumber);
    s->add_option("--max-iter", c.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--epochs", c.epochs, "simulated epochs")->check(CLI::PositiveNumber);
    s->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--out", c.out, "output path (default stdout)");
  };

  auto* exact = app.add_subcommand("exact", "exact chain: stationary distribution and capacity");
  common(exact, true);
  exact->add_option("--state-cap", c.state_cap, "largest state space to build");
  exact->add_option("--dump-matrix", c.dump_matrix, "write transition triplets (0-based) to this CSV");

  auto* bounds = app.add_subcommand("bounds", "lower and upper capacity bounds with the exact value");
  common(bounds, true);
  bounds->add_option("--state-cap", c.state_cap, "largest state space to build");

  auto* rb = app.add_subcommand("rbie", "rate-based iterative estimate");
  common(rb, true);

  auto* db = app.add_subcommand("dbie", "distribution-based iterative estimate");
  common(db, true);
  auto dbflags = [&](CLI::App* s) {
    s->add_option("--precision", c.precision, "auto|double|40|80|160|320");
    s->add_flag("--no-perturb", c.no_perturb, "refuse equal erasure probabilities instead of perturbing");
    s->add_option("--delta", c.delta, "perturbation step for equal erasure probabilities");
  };
  dbflags(db);
  db->add_option("--pmf-csv", c.pmf_csv, "write the destination inter-arrival pmf to this CSV");

  auto* dl = app.add_subcommand("delay", "FCFS delay profile");
  common(dl, true);
  dbflags(dl);
  dl->add_option("--source", c.source, "rbie|dbie");
  dl->add_flag("--include-source", c.include_source, "add the head-of-line wait at the source");

  auto* sm = app.add_subcommand("simulate", "Monte-Carlo simulation with feedback");
  common(sm, true);
  sm->add_option("--warmup", c.warmup, "warm-up epochs (default max(10%, 1e4), at most half)");
  sm->add_flag("--delay", c.track_delay, "track FCFS packet delays");

  auto* nc = app.add_subcommand("netcod", "random linear coding without feedback");
  common(nc, true);
  nc->add_option("--q", c.q, "field size")->check(CLI::IsMember({2u, 16u, 256u, 65536u}));
  nc->add_option("--warmup", c.warmup, "warm-up epochs");
  nc->add_flag("--compare", c.compare, "compare the innovative-count transitions with the exact chain");

  auto* ct = app.add_subcommand("continuous", "continuous-time rates through discretization");
  common(ct, false);
  ct->add_option("--lambdas", c.lambdas, "service rates, 1/s")->delimiter(',')->required();
  ct->add_option("--buffers", c.buffers, "buffer sizes")->delimiter(',')->required();
  ct->add_option("--tau", c.tau, "epoch length, s")->required();
  dbflags(ct);

  auto* al = app.add_subcommand("allocate", "buffer allocation search");
  common(al, false);
  al->add_option("--eps", c.eps, "erasure probabilities")->delimiter(',');
  al->add_option("--budget", c.budget, "total buffer slots")->required();
  al->add_option("--objective", c.objective, "max-throughput|min-delay");
  al->add_option("--floor", c.floor, "throughput floor for min-delay");
  al->add_option("--method", c.method, "auto|exhaustive|neighborhood");
  al->add_flag("--no-rescore", c.no_rescore, "skip re-scoring the top candidates");

  auto* rp = app.add_subcommand("reproduce", "write plot-ready CSV data for a figure");
  common(rp, false);
  rp->add_option("figure", c.figure, "figure id");
  rp->add_flag("--list", c.list, "list figure ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*exact) cmd_exact(c);
    else if (*bounds) cmd_bounds(c);
    else if (*rb) cmd_rbie(c);
    else if (*db) cmd_dbie(c);
    else if (*dl) cmd_delay(c);
    else if (*sm) cmd_simulate(c);
    else if (*nc) cmd_netcod(c);
    else if (*ct) cmd_continuous(c);
    else if (*al) cmd_allocate(c);
    else if (*rp) cmd_reproduce(c);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kConvergence;
  } catch (const CapacityExceededError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSizeCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
