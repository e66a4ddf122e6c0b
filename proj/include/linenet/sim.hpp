#pragma once

#include <cstdint>
#include <vector>

#include "linenet/model.hpp"

namespace linenet::sim {

struct Options {
  long epochs = 1'000'000;
  long warmup = -1;  // negative: default_warmup(epochs)
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  bool track_delay = false;
  // Joint occupancy histogram over state indices (small specs only).
  bool joint_histogram = false;
  long sample_stride = 1;
  int batches = 100;
};

// max(10% of epochs, 10^4), kept below half the run.
long default_warmup(long epochs);

struct SimStats {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long epochs_total = 0;
  long warmup = 0;
  long epochs_run = 0;  // measured epochs after warm-up
  long packets_delivered = 0;
  double throughput = 0.0;
  double throughput_se = 0.0;

  long delay_count = 0;
  double delay_mean = 0.0;
  double delay_variance = 0.0;
  double delay_mean_se = 0.0;
  std::vector<long> delay_histogram;  // index = epochs from storage at the first relay to delivery

  long samples = 0;
  std::vector<std::vector<long>> occupancy_histograms;  // per relay, 0..m
  std::vector<long> joint_histogram;
};

SimStats simulate(const NetworkSpec& spec, const Options& opts);

SimStats simulate_feedback(const NetworkSpec& spec, long epochs, long warmup, std::uint64_t seed);

// Adds FCFS packet tags and records per-packet delay.
SimStats simulate_delay_fcfs(const NetworkSpec& spec, long epochs, long warmup, std::uint64_t seed);

// Kolmogorov-Smirnov distance between a delay histogram and a pmf on the same support.
double ks_distance(const std::vector<long>& histogram, const std::vector<double>& pmf);

struct ContinuousSpec {
  std::vector<double> lambdas;  // service rates, 1/s
  std::vector<int> buffers;
  double tau = 0.0;             // epoch length, s
};

struct Discretized {
  NetworkSpec spec;
  double rate_factor = 1.0;  // multiply a per-epoch capacity by this to get packets/s
};

// eps_i = 1 - lambda_i tau.
Discretized discretize(const ContinuousSpec& c);

}  // namespace linenet::sim
