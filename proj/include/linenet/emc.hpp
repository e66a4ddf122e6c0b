#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linenet/markov.hpp"
#include "linenet/model.hpp"

namespace linenet::emc {

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;

// Y[i] = 1 when link i moves a packet this epoch. Evaluated from the last
// link backwards: a relay accepts when it has room after its own departure.
std::vector<int> auxiliary_y(const OccupancyState& s, const ChannelRealization& x, const NetworkSpec& spec);

OccupancyState step(const OccupancyState& s, const ChannelRealization& x, const NetworkSpec& spec);

// Allocation-free form used by the simulators. n and m have h-1 entries,
// x and y have h. Returns Y_h (a delivery to the destination).
inline int step_inplace(int* n, const std::uint8_t* x, const int* m, int h, int* y) {
  y[h - 1] = (x[h - 1] && n[h - 2] > 0) ? 1 : 0;
  for (int i = h - 2; i >= 0; --i) {
    const bool upstream = i == 0 || n[i - 1] > 0;
    y[i] = (x[i] && upstream && m[i] - n[i] + y[i + 1] > 0) ? 1 : 0;
  }
  for (int j = 0; j < h - 1; ++j) n[j] += y[j] - y[j + 1];
  return y[h - 1];
}

SparseStochasticMatrix build(const NetworkSpec& spec, std::uint64_t state_cap = kDefaultStateCap);

struct ExactSolution {
  StationaryDistribution stationary;
  double capacity = 0.0;
};

ExactSolution solve(const NetworkSpec& spec, const StationaryOptions& opts = {},
                    std::uint64_t state_cap = kDefaultStateCap);

// (1 - eps_h) * Pr[last relay non-empty].
double capacity_from_stationary(const NetworkSpec& spec, const std::vector<double>& pi);

double capacity_exact(const NetworkSpec& spec, const StationaryOptions& opts = {},
                      std::uint64_t state_cap = kDefaultStateCap);

// Mean packet flow over each interior link (links 2..h-1, so h-2 values).
// Throws InconsistencyError when an entry differs from the capacity by more than 10*tol.
std::vector<double> capacity_flow_crosscheck(const NetworkSpec& spec, const StationaryOptions& opts = {},
                                             std::uint64_t state_cap = kDefaultStateCap);

// Same, from an already solved stationary distribution.
std::vector<double> link_flows(const NetworkSpec& spec, const std::vector<double>& pi);

struct Lemma1Report {
  int block_size = 0;   // states per level of the last relay
  int levels = 0;       // m_{h-1} + 1
  bool interior_equal = false;
  bool down_upper_triangular = false;
  double down_min_det = 0.0;       // smallest det over the down blocks
  double down_det_floor = 0.0;     // (eps_bar_h prod eps_k)^block_size
  bool up_lower_triangular = false;
  bool up_singular = false;        // only asserted for h > 2
  bool stay_nonsingular = false;   // I - Omega diagonally dominant and full rank
  std::vector<std::string> notes;
};

// Throws StructuralError naming the first failing block.
Lemma1Report verify_lemma1(const NetworkSpec& spec, std::uint64_t state_cap = 200'000);

struct HMatrixBound {
  double bound = 0.0;
  double relation_residual = 0.0;  // max-norm of H_i x_0 - x_i against the exact solve
  double exact = 0.0;
};

HMatrixBound h_matrix_bound(const NetworkSpec& spec, std::uint64_t state_cap = 200'000);

}  // namespace linenet::emc
