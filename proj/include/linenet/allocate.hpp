#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace linenet::alloc {

enum class Objective { MaxThroughput, MinDelay };
enum class Method { Auto, Exhaustive, Neighborhood };

Objective parse_objective(const std::string& s);
std::string to_string(Objective o);
Method parse_method(const std::string& s);

struct Candidate {
  std::vector<int> buffers;
  double throughput = 0.0;  // rate-based estimate
  double delay = 0.0;       // Little's-law mean from the rate-based estimate
  std::optional<double> dbie;
  std::optional<double> exact;
};

struct Options {
  Objective objective = Objective::MaxThroughput;
  int budget = 0;
  double floor = 0.0;  // throughput floor for MinDelay
  Method method = Method::Auto;
  std::size_t exhaustive_limit = 100'000;
  std::size_t top_k = 10;
  bool rescore = true;
  std::uint64_t exact_cap = 50'000;  // largest state space re-scored exactly
  unsigned threads = 0;              // 0: hardware concurrency
};

struct AllocationResult {
  Objective objective = Objective::MaxThroughput;
  int budget = 0;
  double floor = 0.0;
  std::string method;
  long evaluated = 0;
  Candidate best;
  std::vector<Candidate> top;  // best first
  std::vector<std::string> notes;
};

// Number of buffer vectors with h-1 positive entries summing to at most budget.
std::uint64_t composition_count(int relays, int budget);

// Searches buffer vectors with entries >= 1 and sum <= budget.
AllocationResult allocate(const std::vector<double>& eps, const Options& opts);

}  // namespace linenet::alloc
