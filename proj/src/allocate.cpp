#include "linenet/allocate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <exception>
#include <thread>

#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "linenet/rbie.hpp"

namespace linenet::alloc {

Objective parse_objective(const std::string& s) {
  if (s == "max-throughput") return Objective::MaxThroughput;
  if (s == "min-delay") return Objective::MinDelay;
  throw ValidationError("unknown objective '" + s + "' (max-throughput|min-delay)");
}

std::string to_string(Objective o) { return o == Objective::MaxThroughput ? "max-throughput" : "min-delay"; }

Method parse_method(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "exhaustive") return Method::Exhaustive;
  if (s == "neighborhood") return Method::Neighborhood;
  throw ValidationError("unknown search method '" + s + "' (auto|exhaustive|neighborhood)");
}

std::uint64_t composition_count(int relays, int budget) {
  // Vectors of `relays` positive integers with sum <= budget: C(budget, relays).
  if (budget < relays) return 0;
  long double c = 1.0L;
  for (int i = 1; i <= relays; ++i) c = c * (budget - relays + i) / i;
  return c > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(std::llround(c));
}

namespace {

Candidate evaluate(const std::vector<double>& eps, const std::vector<int>& m) {
  NetworkSpec spec(eps, m);
  const auto sol = rbie::solve(spec);
  Candidate c;
  c.buffers = m;
  c.throughput = rbie::capacity(sol);
  c.delay = delay::mean_delay_little(sol, spec).mean;
  return c;
}

// True when a is preferred over b.
bool better(const Candidate& a, const Candidate& b, const Options& o) {
  if (o.objective == Objective::MaxThroughput) {
    if (a.throughput != b.throughput) return a.throughput > b.throughput;
    if (a.delay != b.delay) return a.delay < b.delay;
  } else {
    const bool fa = a.throughput >= o.floor, fb = b.throughput >= o.floor;
    if (fa != fb) return fa;
    if (!fa) return a.throughput > b.throughput;
    if (a.delay != b.delay) return a.delay < b.delay;
    if (a.throughput != b.throughput) return a.throughput > b.throughput;
  }
  return a.buffers < b.buffers;
}

class Ranking {
 public:
  explicit Ranking(const Options& o) : o_(o) {}
  void offer(Candidate c) {
    ++evaluated;
    auto pos = std::find_if(top.begin(), top.end(), [&](const Candidate& x) { return better(c, x, o_); });
    if (static_cast<std::size_t>(pos - top.begin()) >= o_.top_k) return;
    top.insert(pos, std::move(c));
    if (top.size() > o_.top_k) top.pop_back();
  }
  std::vector<Candidate> top;
  long evaluated = 0;

 private:
  const Options& o_;
};

void enumerate(std::vector<int>& m, int pos, int left, std::vector<std::vector<int>>& out) {
  const int r = static_cast<int>(m.size());
  if (pos == r) {
    out.push_back(m);
    return;
  }
  const int reserve = r - pos - 1;
  for (int v = 1; v <= left - reserve; ++v) {
    m[pos] = v;
    enumerate(m, pos + 1, left - v, out);
  }
}

// Runs f(i) for i in [0, n) on up to `threads` workers (0: hardware concurrency).
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void neighborhood(const std::vector<double>& eps, const Options& o, Ranking& rank) {
  const int r = static_cast<int>(eps.size()) - 1;
  std::map<std::vector<int>, Candidate> seen;
  auto get = [&](const std::vector<int>& m) -> const Candidate& {
    auto it = seen.find(m);
    if (it != seen.end()) return it->second;
    Candidate c = evaluate(eps, m);
    rank.offer(c);
    return seen.emplace(m, std::move(c)).first->second;
  };
  std::vector<int> cur(r, o.budget / r);
  for (int i = 0; i < o.budget % r; ++i) ++cur[i];
  Candidate best = get(cur);
  for (int stepsize = std::max(1, o.budget / (2 * r)); stepsize >= 1;) {
    bool improved = false;
    for (int i = 0; i < r && !improved; ++i) {
      for (int j = -1; j < r && !improved; ++j) {
        // Move stepsize slots from i to j (j = -1: release them), or add slots to i (i == j).
        std::vector<int> trial = cur;
        if (j == i) {
          int total = 0;
          for (int v : trial) total += v;
          if (total + stepsize > o.budget) continue;
          trial[i] += stepsize;
        } else {
          if (trial[i] - stepsize < 1) continue;
          trial[i] -= stepsize;
          if (j >= 0) trial[j] += stepsize;
        }
        const Candidate& c = get(trial);
        if (better(c, best, o)) {
          best = c;
          cur = trial;
          improved = true;
        }
      }
    }
    if (!improved) stepsize /= 2;
  }
}

}  // namespace

AllocationResult allocate(const std::vector<double>& eps, const Options& opts) {
  NetworkSpec probe(eps, std::vector<int>(eps.size() - 1, 1));
  const int r = probe.relays();
  if (opts.budget < r) throw ValidationError("budget must be at least the number of relays");
  if (opts.top_k == 0) throw ValidationError("top_k must be positive");
  AllocationResult out;
  out.objective = opts.objective;
  out.budget = opts.budget;
  out.floor = opts.floor;
  Ranking rank(opts);
  const std::uint64_t count = composition_count(r, opts.budget);
  const bool exhaustive = opts.method == Method::Exhaustive ||
                          (opts.method == Method::Auto && count <= opts.exhaustive_limit);
  if (exhaustive) {
    out.method = "exhaustive";
    std::vector<int> m(r);
    std::vector<std::vector<int>> all;
    enumerate(m, 0, opts.budget, all);
    std::vector<Candidate> scored(all.size());
    parallel_for(all.size(), opts.threads, [&](std::size_t i) { scored[i] = evaluate(eps, all[i]); });
    for (auto& c : scored) rank.offer(std::move(c));
  } else {
    out.method = "neighborhood";
    neighborhood(eps, opts, rank);
  }
  out.evaluated = rank.evaluated;
  out.top = std::move(rank.top);
  if (opts.objective == Objective::MinDelay && out.top.front().throughput < opts.floor)
    out.notes.push_back("no candidate reaches the throughput floor; best throughput reported");
  if (opts.rescore) {
    std::vector<std::string> failures(out.top.size());
    parallel_for(out.top.size(), opts.threads, [&](std::size_t i) {
      auto& c = out.top[i];
      NetworkSpec spec(eps, c.buffers);
      try {
        c.dbie = dbie::capacity(dbie::solve(spec));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      if (spec.state_count() <= opts.exact_cap) c.exact = emc::capacity_exact(spec);
    });
    for (const auto& f : failures)
      if (!f.empty()) out.notes.push_back("distribution-based re-score failed for one candidate: " + f);
  }
  out.best = out.top.front();
  return out;
}

}  // namespace linenet::alloc
