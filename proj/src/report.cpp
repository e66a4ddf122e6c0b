#include "linenet/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "linenet/errors.hpp"

namespace linenet {

std::string version() { return std::string("linenet ") + LINENET_VERSION; }

NetworkSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("eps") || !j.contains("buffers"))
    throw ValidationError("spec must be an object with \"eps\" and \"buffers\"");
  try {
    return NetworkSpec(j.at("eps").get<std::vector<double>>(), j.at("buffers").get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed spec: ") + e.what());
  }
}

json to_json(const NetworkSpec& spec) { return json{{"eps", spec.eps}, {"buffers", spec.buffers}}; }

NetworkSpec load_spec(const std::string& arg) {
  std::string text = arg;
  if (arg.empty() || arg.front() != '{') {
    std::ifstream in(arg);
    if (!in) throw ValidationError("cannot open spec file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

json to_json(const rbie::RateSolution& sol) {
  return json{{"r", sol.r},     {"pb", sol.pb}, {"phi", sol.phi}, {"iterations", sol.iterations},
              {"residual", sol.residual}, {"flow_residual", rbie::flow_residual(sol)}};
}

json mixture_to_json(const WideMixture& f) {
  json arr = json::array();
  if (f.atom != 0) arr.push_back(json{{"p", to_double(f.atom)}, {"theta", 0.0}, {"identity", true}});
  for (const auto& t : f.terms) arr.push_back(json{{"p", to_double(t.p)}, {"theta", to_double(t.theta)}});
  return arr;
}

json to_json(const dbie::DistSolution& sol) {
  json f = json::array();
  for (const auto& m : sol.f) f.push_back(mixture_to_json(m));
  return json{{"pb", sol.pb},
              {"pi_embedded", sol.pi_embedded},
              {"alpha", sol.alpha},
              {"starvation_probability", sol.starvation_norm},
              {"f", f},
              {"iterations", sol.iterations},
              {"residual", sol.residual},
              {"eps_used", sol.eps_used},
              {"digits", sol.digits},
              {"notes", sol.notes}};
}

json to_json(const delay::DelayProfile& p, bool with_pmf) {
  json j{{"mean", p.mean},
         {"variance", p.variance},
         {"tail_mass_dropped", p.tail_mass_dropped},
         {"node_means", p.node_means}};
  if (with_pmf) j["pmf"] = p.pmf;
  return j;
}

json to_json(const sim::SimStats& s) {
  json j{{"seed", s.seed},
         {"stream", s.stream},
         {"epochs_total", s.epochs_total},
         {"warmup", s.warmup},
         {"epochs_run", s.epochs_run},
         {"packets_delivered", s.packets_delivered},
         {"throughput", s.throughput},
         {"throughput_se", s.throughput_se},
         {"occupancy_histograms", s.occupancy_histograms},
         {"samples", s.samples}};
  if (s.delay_count > 0) {
    j["delay"] = json{{"count", s.delay_count},
                      {"mean", s.delay_mean},
                      {"mean_se", s.delay_mean_se},
                      {"variance", s.delay_variance},
                      {"histogram", s.delay_histogram}};
  }
  return j;
}

json to_json(const netcod::NoFeedbackStats& s) {
  return json{{"q", s.q},
              {"seed", s.seed},
              {"epochs_total", s.epochs_total},
              {"warmup", s.warmup},
              {"epochs_run", s.epochs_run},
              {"innovative", s.innovative},
              {"rate", s.rate},
              {"rate_se", s.rate_se},
              {"eta_mean", s.eta_mean},
              {"eta_histograms", s.eta_histograms},
              {"max_width", s.max_width}};
}

namespace {

json candidate_json(const alloc::Candidate& c) {
  json j{{"buffers", c.buffers}, {"throughput", c.throughput}, {"mean_delay", c.delay}};
  j["dbie"] = c.dbie ? json(*c.dbie) : json(nullptr);
  j["exact"] = c.exact ? json(*c.exact) : json(nullptr);
  return j;
}

}  // namespace

json to_json(const alloc::AllocationResult& r) {
  json top = json::array();
  for (const auto& c : r.top) top.push_back(candidate_json(c));
  return json{{"objective", alloc::to_string(r.objective)},
              {"budget", r.budget},
              {"floor", r.floor},
              {"method", r.method},
              {"evaluated", r.evaluated},
              {"best", candidate_json(r.best)},
              {"top", top},
              {"notes", r.notes}};
}

json to_json(const amc::BoundsResult& b) {
  json j{{"lower", b.lower}};
  j["upper"] = b.upper ? json(*b.upper) : json(nullptr);
  j["exact"] = b.exact ? json(*b.exact) : json(nullptr);
  if (b.exact && b.upper) j["sandwich_holds"] = b.lower <= *b.exact + 1e-9 && *b.exact <= *b.upper + 1e-9;
  j["notes"] = b.notes;
  return j;
}

void write_pmf_csv(std::ostream& os, const std::vector<double>& pmf) {
  os << "delay_epochs,probability,cumulative\n";
  auto old = os.precision(12);
  double c = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    c += pmf[k];
    os << k << ',' << pmf[k] << ',' << c << '\n';
  }
  os.precision(old);
}

void write_mixture_pmf_csv(std::ostream& os, const WideMixture& f, double tail) {
  os << "k,mass\n";
  auto old = os.precision(12);
  WideReal acc = f.atom;
  if (f.atom != 0) os << 0 << ',' << to_double(f.atom) << '\n';
  for (long k = 1; k < 100'000'000; ++k) {
    const WideReal p = f.pmf(k);
    acc += p;
    os << k << ',' << to_double(p) << '\n';
    if (WideReal(1) - acc < WideReal(tail)) break;
  }
  os.precision(old);
}

}  // namespace linenet
