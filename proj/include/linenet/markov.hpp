#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "linenet/model.hpp"

namespace linenet {

// Row-compressed stochastic matrix.
struct SparseStochasticMatrix {
  std::size_t dimension = 0;
  std::vector<std::size_t> row_start{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nonzeros() const { return val.size(); }
  std::size_t row_nonzeros(std::size_t r) const { return row_start[r + 1] - row_start[r]; }
  double at(std::size_t r, std::size_t c) const;
  double row_sum(std::size_t r) const;
  // Throws InconsistencyError if an entry leaves [0,1] or a row sum is off by more than tol.
  void check_stochastic(double tol = 1e-12) const;
  void write_csv(std::ostream& os) const;
};

struct StationaryOptions {
  enum class Method { Auto, Power, Direct };
  double tol = 1e-12;
  long max_iter = 1'000'000;
  Method method = Method::Auto;
  // Auto: power sweeps before falling back to a direct solve.
  long power_budget = 5000;
  // Largest dimension handed to the sparse LU.
  std::size_t direct_limit = 400'000;
};

struct StationaryDistribution {
  std::vector<double> pi;
  double residual = 0.0;  // max-norm of pi P - pi
  long iterations = 0;
  std::string method;
};

bool is_irreducible(const SparseStochasticMatrix& P);

StationaryDistribution stationary(const SparseStochasticMatrix& P, const StationaryOptions& opts = {});

double stationary_residual(const SparseStochasticMatrix& P, const std::vector<double>& pi);

// One-epoch transition rule on occupancy vectors, written into `next`.
using StepRule = std::function<void(const OccupancyState& s, const ChannelRealization& x, OccupancyState& next)>;

// Enumerates all 2^h channel realizations from every state.
SparseStochasticMatrix build_chain(const NetworkSpec& spec, const StepRule& step, std::uint64_t state_cap);

// Probability of each of the 2^h realizations, indexed by the bit pattern (bit i = x[i]).
std::vector<double> realization_probabilities(const NetworkSpec& spec);

}  // namespace linenet
