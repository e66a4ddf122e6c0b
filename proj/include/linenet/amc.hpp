#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linenet/emc.hpp"
#include "linenet/markov.hpp"
#include "linenet/model.hpp"

namespace linenet::amc {

// A relay forwards whenever its link succeeds and it holds a packet; an
// arrival at a full relay is dropped instead of being retried.
inline void step_inplace(int* n, const std::uint8_t* x, const int* m, int h, int* y) {
  y[0] = x[0];
  for (int i = 1; i < h; ++i) y[i] = (x[i] && n[i - 1] > 0) ? 1 : 0;
  for (int j = 0; j < h - 1; ++j) n[j] += (y[j] && m[j] - n[j] + y[j + 1] > 0 ? 1 : 0) - y[j + 1];
}

OccupancyState step(const OccupancyState& s, const ChannelRealization& x, const NetworkSpec& spec);

SparseStochasticMatrix build(const NetworkSpec& spec, std::uint64_t state_cap = emc::kDefaultStateCap);

double capacity_lower(const NetworkSpec& spec, const StationaryOptions& opts = {},
                      std::uint64_t state_cap = emc::kDefaultStateCap);

// Lower bound of the network whose buffers are the prefix sums of spec.buffers.
double capacity_upper(const NetworkSpec& spec, const StationaryOptions& opts = {},
                      std::uint64_t state_cap = emc::kDefaultStateCap);

struct BoundsResult {
  double lower = 0.0;
  std::optional<double> upper;
  std::optional<double> exact;
  std::vector<std::string> notes;
};

// Upper (or exact) is left empty when its state space exceeds the cap.
BoundsResult bounds(const NetworkSpec& spec, bool with_exact, const StationaryOptions& opts = {},
                    std::uint64_t state_cap = emc::kDefaultStateCap);

// The exact chain never holds fewer packets at any relay than the
// approximate chain, epoch by epoch, under one shared channel stream.
bool coupled_boundedness_check(const NetworkSpec& spec, std::uint64_t seed, long epochs);

// Which side of the boundedness inequality is tested; Reversed expects the
// approximate chain to dominate and exists to show the check can fail.
enum class CouplingOrder { ExactDominates, Reversed };
bool coupled_boundedness_check(const NetworkSpec& spec, std::uint64_t seed, long epochs, CouplingOrder order);

// Approximate chain on prefix-summed buffers versus the exact chain, both
// extended with the destination's cumulative count: every suffix sum of the
// approximate state dominates the exact one.
enum class UpperBuffers { PrefixSums, Unmodified };
bool coupled_upper_check(const NetworkSpec& spec, std::uint64_t seed, long epochs,
                         UpperBuffers buffers = UpperBuffers::PrefixSums);

}  // namespace linenet::amc
