#pragma once

#include <vector>

#include "linenet/model.hpp"

namespace linenet::rbie {

struct LocalParams {
  double alpha = 0.0;   // up-step probability from a non-empty relay
  double beta = 0.0;    // down-step probability
  double alpha0 = 0.0;  // up-step probability from empty
};

// r: arrival rate into the relay, eps_next: erasure on its outgoing link,
// pb_next: blocking probability of the next node.
LocalParams local_params(double r, double eps_next, double pb_next);

// Stationary occupancy 0..m of the birth-death relay model.
std::vector<double> occupancy_phi(double r, double eps_next, double pb_next, int m);

double step_pb(double r, double eps_next, double pb_next, int m);
double step_rate(double r, double eps_next, double pb_next, int m);

struct Options {
  long max_iter = 100'000;
  double tol = 1e-12;
  double initial_pb = 0.0;
  bool record_history = false;
};

struct RateSolution {
  std::vector<double> r;    // h arrival rates; r[0] = 1 - eps_1
  std::vector<double> pb;   // h blocking probabilities; pb[h-1] = 0
  std::vector<std::vector<double>> phi;  // h-1 relay occupancy distributions
  long iterations = 0;
  double residual = 0.0;
  // Per-sweep iterates when requested.
  std::vector<std::vector<double>> r_history;
  std::vector<std::vector<double>> pb_history;
};

// Forward sweeps: r moves downstream within a sweep, pb uses the previous sweep.
RateSolution solve(const NetworkSpec& spec, const Options& opts = {});

// r_h (1 - pb_h); throws InconsistencyError if the flows r_i (1 - pb_i) disagree by more than 1e-6.
double capacity(const RateSolution& sol);

// max_i |r_i (1 - pb_i) - r_h (1 - pb_h)|.
double flow_residual(const RateSolution& sol);

}  // namespace linenet::rbie
