#include "linenet/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "linenet/errors.hpp"

namespace linenet {

NetworkSpec::NetworkSpec(std::vector<double> e, std::vector<int> m) : eps(std::move(e)), buffers(std::move(m)) {
  validate();
}

void NetworkSpec::validate() const {
  if (eps.size() < 2) throw ValidationError("a line network needs at least 2 hops");
  if (buffers.size() + 1 != eps.size())
    throw ValidationError("expected " + std::to_string(eps.size() - 1) + " buffer sizes for " +
                          std::to_string(eps.size()) + " erasure probabilities, got " +
                          std::to_string(buffers.size()));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0))
      throw ValidationError("eps[" + std::to_string(i) + "] must lie strictly inside (0,1)");
  }
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    if (buffers[i] < 1) throw ValidationError("buffers[" + std::to_string(i) + "] must be >= 1");
  }
}

std::uint64_t NetworkSpec::state_count() const {
  std::uint64_t n = 1;
  for (int m : buffers) {
    auto f = static_cast<std::uint64_t>(m) + 1;
    if (n > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    n *= f;
  }
  return n;
}

bool NetworkSpec::distinct_eps() const {
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = i + 1; j < eps.size(); ++j)
      if (eps[i] == eps[j]) return false;
  return true;
}

std::string NetworkSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps=(";
  for (std::size_t i = 0; i < eps.size(); ++i) os << (i ? "," : "") << eps[i];
  os << ") m=(";
  for (std::size_t i = 0; i < buffers.size(); ++i) os << (i ? "," : "") << buffers[i];
  os << ")";
  return os.str();
}

std::vector<int> prefix_sum_buffers(const std::vector<int>& buffers) {
  std::vector<int> out(buffers.size());
  long acc = 0;
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    acc += buffers[i];
    if (acc > std::numeric_limits<int>::max()) throw ValidationError("prefix-summed buffer overflows int");
    out[i] = static_cast<int>(acc);
  }
  return out;
}

std::uint64_t state_index(const OccupancyState& s, const NetworkSpec& spec) {
  if (s.size() != spec.buffers.size())
    throw InvalidStateError("state has " + std::to_string(s.size()) + " components, expected " +
                            std::to_string(spec.buffers.size()));
  std::uint64_t k = 0;
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] > spec.buffers[i])
      throw InvalidStateError("state component " + std::to_string(i) + " = " + std::to_string(s[i]) +
                              " outside [0," + std::to_string(spec.buffers[i]) + "]");
    k += static_cast<std::uint64_t>(s[i]) * stride;
    stride *= static_cast<std::uint64_t>(spec.buffers[i]) + 1;
  }
  return k;
}

OccupancyState index_state(std::uint64_t k, const NetworkSpec& spec) {
  if (k >= spec.state_count())
    throw InvalidStateError("state index " + std::to_string(k) + " out of range [0," +
                            std::to_string(spec.state_count()) + ")");
  OccupancyState s(spec.buffers.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto radix = static_cast<std::uint64_t>(spec.buffers[i]) + 1;
    s[i] = static_cast<int>(k % radix);
    k /= radix;
  }
  return s;
}

void sample_channels(const NetworkSpec& spec, CounterRng& rng, ChannelRealization& out) {
  out.resize(spec.eps.size());
  for (std::size_t i = 0; i < spec.eps.size(); ++i) out[i] = rng.uniform() >= spec.eps[i] ? 1 : 0;
}

ChannelRealization sample_channels(const NetworkSpec& spec, CounterRng& rng) {
  ChannelRealization x;
  sample_channels(spec, rng, x);
  return x;
}

}  // namespace linenet
