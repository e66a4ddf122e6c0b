#include "linenet/sim.hpp"

#include <algorithm>
#include <cmath>

#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "linenet/rng.hpp"

namespace linenet::sim {

long default_warmup(long epochs) { return std::min(std::max(epochs / 10, 10'000L), epochs / 2); }

namespace {

// FCFS ring of storage tags for one relay.
struct TagRing {
  std::vector<long> slot;
  int head = 0;
  int size = 0;
  explicit TagRing(int m) : slot(m) {}
  void push(long tag) {
    slot[(head + size) % slot.size()] = tag;
    ++size;
  }
  long pop() {
    const long t = slot[head];
    head = (head + 1) % static_cast<int>(slot.size());
    --size;
    return t;
  }
};

double batch_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1) / n);
}

}  // namespace

SimStats simulate(const NetworkSpec& spec, const Options& opts) {
  spec.validate();
  const long warmup = opts.warmup < 0 ? default_warmup(opts.epochs) : opts.warmup;
  if (!(opts.epochs > warmup && warmup >= 0)) throw ValidationError("need epochs > warmup >= 0");
  if (opts.sample_stride < 1 || opts.batches < 1) throw ValidationError("stride and batch count must be positive");
  const int h = spec.hops();
  const int* m = spec.buffers.data();

  SimStats st;
  st.seed = opts.seed;
  st.stream = opts.stream;
  st.epochs_total = opts.epochs;
  st.warmup = warmup;
  st.epochs_run = opts.epochs - warmup;
  st.occupancy_histograms.resize(h - 1);
  for (int j = 0; j < h - 1; ++j) st.occupancy_histograms[j].assign(m[j] + 1, 0);
  if (opts.joint_histogram) {
    if (spec.state_count() > 10'000'000) throw CapacityExceededError("joint histogram too large");
    st.joint_histogram.assign(spec.state_count(), 0);
  }

  std::vector<int> n(h - 1, 0), y(h);
  ChannelRealization x(h);
  std::vector<TagRing> rings;
  if (opts.track_delay)
    for (int j = 0; j < h - 1; ++j) rings.emplace_back(m[j]);

  const long measured = st.epochs_run;
  const int nb = static_cast<int>(std::min<long>(opts.batches, measured));
  std::vector<double> batch_tp(nb, 0.0), batch_dsum(nb, 0.0), batch_dcount(nb, 0.0);
  double dsum = 0.0, dsq = 0.0;
  CounterRng rng(opts.seed, opts.stream);

  for (long l = 0; l < opts.epochs; ++l) {
    sample_channels(spec, rng, x);
    const int delivered = emc::step_inplace(n.data(), x.data(), m, h, y.data());
    const bool live = l >= warmup;
    const int batch = live ? static_cast<int>((l - warmup) * nb / measured) : 0;
    if (opts.track_delay) {
      // Downstream first so every ring has room for its arrival.
      if (y[h - 1]) {
        const long tag = rings[h - 2].pop();
        if (live && tag >= warmup) {
          const long d = l - tag;
          if (static_cast<std::size_t>(d) >= st.delay_histogram.size()) st.delay_histogram.resize(d + 1, 0);
          ++st.delay_histogram[d];
          ++st.delay_count;
          dsum += static_cast<double>(d);
          dsq += static_cast<double>(d) * static_cast<double>(d);
          batch_dsum[batch] += static_cast<double>(d);
          batch_dcount[batch] += 1.0;
        }
      }
      for (int i = h - 2; i >= 1; --i)
        if (y[i]) rings[i].push(rings[i - 1].pop());
      if (y[0]) rings[0].push(l);
    }
    if (!live) continue;
    if (delivered) {
      ++st.packets_delivered;
      batch_tp[batch] += 1.0;
    }
    if ((l - warmup) % opts.sample_stride == 0) {
      ++st.samples;
      for (int j = 0; j < h - 1; ++j) ++st.occupancy_histograms[j][n[j]];
      if (opts.joint_histogram) ++st.joint_histogram[state_index(n, spec)];
    }
  }

  st.throughput = static_cast<double>(st.packets_delivered) / static_cast<double>(measured);
  std::vector<double> rates(nb);
  for (int b = 0; b < nb; ++b) {
    const long lo = b * measured / nb, hi = (b + 1) * measured / nb;
    rates[b] = batch_tp[b] / static_cast<double>(hi - lo);
  }
  st.throughput_se = batch_se(rates);
  if (st.delay_count > 0) {
    const double c = static_cast<double>(st.delay_count);
    st.delay_mean = dsum / c;
    st.delay_variance = c > 1 ? (dsq - dsum * dsum / c) / (c - 1) : 0.0;
    std::vector<double> means;
    for (int b = 0; b < nb; ++b)
      if (batch_dcount[b] > 0) means.push_back(batch_dsum[b] / batch_dcount[b]);
    st.delay_mean_se = batch_se(means);
  }
  return st;
}

SimStats simulate_feedback(const NetworkSpec& spec, long epochs, long warmup, std::uint64_t seed) {
  Options o;
  o.epochs = epochs;
  o.warmup = warmup;
  o.seed = seed;
  return simulate(spec, o);
}

SimStats simulate_delay_fcfs(const NetworkSpec& spec, long epochs, long warmup, std::uint64_t seed) {
  Options o;
  o.epochs = epochs;
  o.warmup = warmup;
  o.seed = seed;
  o.track_delay = true;
  return simulate(spec, o);
}

double ks_distance(const std::vector<long>& histogram, const std::vector<double>& pmf) {
  double total = 0.0;
  for (long c : histogram) total += static_cast<double>(c);
  if (total == 0.0) throw ValidationError("empty histogram");
  double ce = 0.0, cp = 0.0, worst = 0.0;
  const std::size_t n = std::max(histogram.size(), pmf.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (k < histogram.size()) ce += static_cast<double>(histogram[k]) / total;
    if (k < pmf.size()) cp += pmf[k];
    worst = std::max(worst, std::abs(ce - cp));
  }
  return worst;
}

Discretized discretize(const ContinuousSpec& c) {
  if (!(c.tau > 0.0)) throw ValidationError("tau must be positive");
  Discretized d;
  std::vector<double> eps;
  for (double lam : c.lambdas) {
    if (!(lam > 0.0)) throw ValidationError("service rates must be positive");
    if (lam * c.tau >= 1.0) throw ValidationError("step too coarse: lambda * tau must be < 1");
    eps.push_back(1.0 - lam * c.tau);
  }
  d.spec = NetworkSpec(eps, c.buffers);
  d.rate_factor = 1.0 / c.tau;
  return d;
}

}  // namespace linenet::sim
