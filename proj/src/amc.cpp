#include "linenet/amc.hpp"

#include "linenet/errors.hpp"
#include "linenet/rng.hpp"

namespace linenet::amc {

OccupancyState step(const OccupancyState& s, const ChannelRealization& x, const NetworkSpec& spec) {
  state_index(s, spec);
  OccupancyState n = s;
  std::vector<int> y(spec.hops());
  step_inplace(n.data(), x.data(), spec.buffers.data(), spec.hops(), y.data());
  return n;
}

SparseStochasticMatrix build(const NetworkSpec& spec, std::uint64_t state_cap) {
  const int h = spec.hops();
  std::vector<int> y(h);
  return build_chain(
      spec,
      [&](const OccupancyState& s, const ChannelRealization& x, OccupancyState& next) {
        next = s;
        step_inplace(next.data(), x.data(), spec.buffers.data(), h, y.data());
      },
      state_cap);
}

double capacity_lower(const NetworkSpec& spec, const StationaryOptions& opts, std::uint64_t state_cap) {
  const auto st = stationary(build(spec, state_cap), opts);
  return emc::capacity_from_stationary(spec, st.pi);
}

double capacity_upper(const NetworkSpec& spec, const StationaryOptions& opts, std::uint64_t state_cap) {
  spec.validate();
  NetworkSpec expanded = spec;
  expanded.buffers = prefix_sum_buffers(spec.buffers);
  return capacity_lower(expanded, opts, state_cap);
}

BoundsResult bounds(const NetworkSpec& spec, bool with_exact, const StationaryOptions& opts,
                    std::uint64_t state_cap) {
  BoundsResult out;
  out.lower = capacity_lower(spec, opts, state_cap);
  try {
    out.upper = capacity_upper(spec, opts, state_cap);
  } catch (const CapacityExceededError&) {
    out.notes.push_back("upper bound unavailable at this size");
  }
  if (with_exact) {
    try {
      out.exact = emc::capacity_exact(spec, opts, state_cap);
    } catch (const CapacityExceededError&) {
      out.notes.push_back("exact capacity unavailable at this size");
    }
  }
  if (!spec.distinct_eps()) out.notes.push_back("erasure probabilities are not pairwise distinct");
  return out;
}

bool coupled_boundedness_check(const NetworkSpec& spec, std::uint64_t seed, long epochs) {
  return coupled_boundedness_check(spec, seed, epochs, CouplingOrder::ExactDominates);
}

bool coupled_boundedness_check(const NetworkSpec& spec, std::uint64_t seed, long epochs, CouplingOrder order) {
  spec.validate();
  const int h = spec.hops();
  const int* m = spec.buffers.data();
  std::vector<int> n(h - 1, 0), a(h - 1, 0), y(h);
  ChannelRealization x(h);
  CounterRng rng(seed);
  for (long l = 0; l < epochs; ++l) {
    sample_channels(spec, rng, x);
    emc::step_inplace(n.data(), x.data(), m, h, y.data());
    step_inplace(a.data(), x.data(), m, h, y.data());
    for (int i = 0; i < h - 1; ++i) {
      const bool ok = order == CouplingOrder::ExactDominates ? n[i] >= a[i] : a[i] >= n[i];
      if (!ok) return false;
    }
  }
  return true;
}

bool coupled_upper_check(const NetworkSpec& spec, std::uint64_t seed, long epochs, UpperBuffers buffers) {
  spec.validate();
  const int h = spec.hops();
  const std::vector<int> wide = buffers == UpperBuffers::PrefixSums ? prefix_sum_buffers(spec.buffers) : spec.buffers;
  // Extended states: relays 0..h-2 followed by the destination count.
  std::vector<long> ne(h, 0), qe(h, 0);
  std::vector<int> n(h - 1, 0), a(h - 1, 0), y(h);
  ChannelRealization x(h);
  CounterRng rng(seed);
  for (long l = 0; l < epochs; ++l) {
    sample_channels(spec, rng, x);
    ne[h - 1] += emc::step_inplace(n.data(), x.data(), spec.buffers.data(), h, y.data());
    step_inplace(a.data(), x.data(), wide.data(), h, y.data());
    qe[h - 1] += y[h - 1];
    long sn = ne[h - 1], sq = qe[h - 1];
    if (sq < sn) return false;
    for (int i = h - 2; i >= 0; --i) {
      sn += n[i];
      sq += a[i];
      if (sq < sn) return false;
    }
  }
  return true;
}

}  // namespace linenet::amc
