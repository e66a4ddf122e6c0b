#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linenet/rng.hpp"

namespace linenet {

// A line network src -> v_1 -> ... -> v_{h-1} -> dst. Link i (0-based) enters
// node i; eps[i] is its per-epoch erasure probability. buffers[i] is the size
// of intermediate node v_{i+1}.
struct NetworkSpec {
  std::vector<double> eps;
  std::vector<int> buffers;

  NetworkSpec() = default;
  NetworkSpec(std::vector<double> e, std::vector<int> m);

  int hops() const { return static_cast<int>(eps.size()); }
  int relays() const { return static_cast<int>(buffers.size()); }
  double success(int link) const { return 1.0 - eps[link]; }

  // Throws ValidationError if h < 2, lengths mismatch, eps outside (0,1) or a buffer < 1.
  void validate() const;

  // Number of occupancy states, prod(m_i + 1). Saturates at UINT64_MAX.
  std::uint64_t state_count() const;

  // Erasure probabilities are pairwise distinct.
  bool distinct_eps() const;

  std::string describe() const;
};

// Prefix sums (m_1, m_1+m_2, ...).
std::vector<int> prefix_sum_buffers(const std::vector<int>& buffers);

using OccupancyState = std::vector<int>;
using ChannelRealization = std::vector<std::uint8_t>;

// 0-based mixed-radix index: s_1 + sum_{i>=2} s_i * prod_{j<i}(m_j+1).
std::uint64_t state_index(const OccupancyState& s, const NetworkSpec& spec);
OccupancyState index_state(std::uint64_t k, const NetworkSpec& spec);

// x[i] = 1 when link i delivers this epoch (probability 1 - eps[i]).
ChannelRealization sample_channels(const NetworkSpec& spec, CounterRng& rng);
void sample_channels(const NetworkSpec& spec, CounterRng& rng, ChannelRealization& out);

}  // namespace linenet
