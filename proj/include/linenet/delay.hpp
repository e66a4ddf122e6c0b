#pragma once

#include <string>
#include <vector>

#include "linenet/dbie.hpp"
#include "linenet/model.hpp"
#include "linenet/rbie.hpp"

namespace linenet::delay {

struct NodeDelayInputs {
  std::vector<std::vector<double>> psi;  // per relay, occupancy 0..m-1 seen by a stored arrival
  std::vector<double> rho;               // per relay blocking estimate
  std::vector<double> eps_eff;           // per relay effective failure of its outgoing link
  double source_eps_eff = 0.0;           // head-of-line failure at the source
  std::vector<std::string> notes;
};

NodeDelayInputs psi_rho_from_rbie(const rbie::RateSolution& sol, const NetworkSpec& spec);
NodeDelayInputs psi_rho_from_dbie(const dbie::DistSolution& sol, const NetworkSpec& spec);

// pmf of the sum of k geometrics with failure eps_eff, on 0..length-1.
std::vector<double> negative_binomial_pmf(int k, double eps_eff, std::size_t length);

struct NodePmf {
  std::vector<double> pmf;  // index = epochs
  double mean = 0.0;
  double variance = 0.0;
  double dropped = 0.0;
};

// Waiting plus service time at one relay: sum_i psi(i) NB(i+1, eps_eff).
NodePmf node_delay(const std::vector<double>& psi, double eps_eff, double tail_tol = 1e-9);

struct DelayProfile {
  std::vector<double> pmf;
  double mean = 0.0;
  double variance = 0.0;
  double tail_mass_dropped = 0.0;
  std::vector<double> node_means;
};

struct ProfileOptions {
  bool include_source = false;
  double factor_tail = 1e-9;
  double max_dropped = 1e-6;
};

// Convolution of the per-relay delays (independence across relays assumed).
DelayProfile delay_profile(const NetworkSpec& spec, const NodeDelayInputs& in, const ProfileOptions& opts = {});

struct LittleResult {
  double mean = 0.0;
  double capacity = 0.0;
  std::vector<double> contributions;  // <phi_i> / capacity per relay
};

LittleResult mean_delay_little(const rbie::RateSolution& sol, const NetworkSpec& spec);

}  // namespace linenet::delay
