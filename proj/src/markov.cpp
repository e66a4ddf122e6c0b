#include "linenet/markov.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "linenet/errors.hpp"

namespace linenet {

double SparseStochasticMatrix::at(std::size_t r, std::size_t c) const {
  for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k)
    if (col[k] == c) return val[k];
  return 0.0;
}

double SparseStochasticMatrix::row_sum(std::size_t r) const {
  double s = 0.0;
  for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) s += val[k];
  return s;
}

void SparseStochasticMatrix::check_stochastic(double tol) const {
  for (std::size_t r = 0; r < dimension; ++r) {
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k)
      if (val[k] < 0.0 || val[k] > 1.0) throw InconsistencyError("matrix entry outside [0,1] in row " + std::to_string(r));
    if (std::abs(row_sum(r) - 1.0) > tol) throw InconsistencyError("row " + std::to_string(r) + " does not sum to 1");
  }
}

void SparseStochasticMatrix::write_csv(std::ostream& os) const {
  os << "row,col,prob\n";
  auto old = os.precision(17);
  for (std::size_t r = 0; r < dimension; ++r)
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) os << r << ',' << col[k] << ',' << val[k] << '\n';
  os.precision(old);
}

namespace {

std::vector<char> reach(const SparseStochasticMatrix& P, bool reverse) {
  const std::size_t n = P.dimension;
  std::vector<std::vector<std::uint32_t>> rev;
  if (reverse) {
    rev.resize(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = P.row_start[r]; k < P.row_start[r + 1]; ++k)
        if (P.val[k] > 0.0) rev[P.col[k]].push_back(static_cast<std::uint32_t>(r));
  }
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    auto r = stack.back();
    stack.pop_back();
    auto visit = [&](std::uint32_t c) {
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    };
    if (reverse) {
      for (auto c : rev[r]) visit(c);
    } else {
      for (std::size_t k = P.row_start[r]; k < P.row_start[r + 1]; ++k)
        if (P.val[k] > 0.0) visit(P.col[k]);
    }
  }
  return seen;
}

void left_multiply(const SparseStochasticMatrix& P, const std::vector<double>& x, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < P.dimension; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t k = P.row_start[r]; k < P.row_start[r + 1]; ++k) y[P.col[k]] += xr * P.val[k];
  }
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    s += x;
  }
  for (double& x : v) x /= s;
}

bool power(const SparseStochasticMatrix& P, std::vector<double>& pi, long sweeps, double tol, long& used,
           double& residual) {
  std::vector<double> next(P.dimension);
  for (long it = 0; it < sweeps; ++it) {
    left_multiply(P, pi, next);
    residual = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) residual = std::max(residual, std::abs(next[i] - pi[i]));
    pi.swap(next);
    ++used;
    if (residual <= tol) {
      normalize(pi);
      residual = stationary_residual(P, pi);
      if (residual <= tol) return true;
    }
  }
  return false;
}

std::vector<double> direct(const SparseStochasticMatrix& P) {
  const auto n = static_cast<Eigen::Index>(P.dimension);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(P.nonzeros() + 2 * P.dimension);
  // Rows of (P^T - I), with the last equation replaced by sum(pi) = 1.
  for (std::size_t r = 0; r < P.dimension; ++r) {
    for (std::size_t k = P.row_start[r]; k < P.row_start[r + 1]; ++k) {
      auto c = static_cast<Eigen::Index>(P.col[k]);
      if (c != n - 1) trip.emplace_back(c, static_cast<Eigen::Index>(r), P.val[k]);
    }
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) trip.emplace_back(i, i, -1.0);
  for (Eigen::Index j = 0; j < n; ++j) trip.emplace_back(n - 1, j, 1.0);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericError("sparse LU factorization failed");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw NumericError("sparse LU solve failed");
  std::vector<double> pi(x.data(), x.data() + n);
  normalize(pi);
  return pi;
}

}  // namespace

bool is_irreducible(const SparseStochasticMatrix& P) {
  if (P.dimension == 0) return false;
  auto fwd = reach(P, false);
  auto bwd = reach(P, true);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c; });
}

double stationary_residual(const SparseStochasticMatrix& P, const std::vector<double>& pi) {
  std::vector<double> y(P.dimension);
  left_multiply(P, pi, y);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(y[i] - pi[i]));
  return r;
}

StationaryDistribution stationary(const SparseStochasticMatrix& P, const StationaryOptions& opts) {
  if (!is_irreducible(P)) throw ValidationError("transition matrix is not irreducible");
  StationaryDistribution out;
  if (P.dimension == 1) {
    out.pi = {1.0};
    out.method = "trivial";
    return out;
  }
  using M = StationaryOptions::Method;
  const bool direct_ok = P.dimension <= opts.direct_limit;
  if (opts.method == M::Direct) {
    if (!direct_ok) throw CapacityExceededError("chain too large for the direct solver");
    out.pi = direct(P);
    out.residual = stationary_residual(P, out.pi);
    out.method = "direct";
    return out;
  }
  out.pi.assign(P.dimension, 1.0 / static_cast<double>(P.dimension));
  out.method = "power";
  long budget = opts.method == M::Auto && direct_ok ? std::min(opts.power_budget, opts.max_iter) : opts.max_iter;
  if (power(P, out.pi, budget, opts.tol, out.iterations, out.residual)) return out;
  if (opts.method == M::Auto && direct_ok) {
    out.pi = direct(P);
    out.residual = stationary_residual(P, out.pi);
    out.method = "power+direct";
    if (out.residual <= std::max(opts.tol, 1e-13)) return out;
  }
  throw ConvergenceError("stationary solve did not reach tolerance", out.residual);
}

std::vector<double> realization_probabilities(const NetworkSpec& spec) {
  const int h = spec.hops();
  std::vector<double> pr(std::size_t{1} << h);
  for (std::size_t b = 0; b < pr.size(); ++b) {
    double p = 1.0;
    for (int i = 0; i < h; ++i) p *= (b >> i & 1) ? spec.success(i) : spec.eps[i];
    pr[b] = p;
  }
  return pr;
}

SparseStochasticMatrix build_chain(const NetworkSpec& spec, const StepRule& step, std::uint64_t state_cap) {
  spec.validate();
  const std::uint64_t n = spec.state_count();
  if (n > state_cap)
    throw CapacityExceededError("state space of " + std::to_string(n) + " states exceeds the cap of " +
                                std::to_string(state_cap) + "; use the bounds or iterative estimates instead");
  if (spec.hops() > 24) throw CapacityExceededError("realization enumeration limited to 24 hops");
  const int h = spec.hops();
  const auto probs = realization_probabilities(spec);
  std::vector<ChannelRealization> xs(probs.size(), ChannelRealization(h));
  for (std::size_t b = 0; b < probs.size(); ++b)
    for (int i = 0; i < h; ++i) xs[b][i] = static_cast<std::uint8_t>(b >> i & 1);

  SparseStochasticMatrix P;
  P.dimension = n;
  P.row_start.reserve(n + 1);
  std::vector<std::pair<std::uint32_t, double>> row;
  OccupancyState s, next;
  for (std::uint64_t k = 0; k < n; ++k) {
    s = index_state(k, spec);
    row.clear();
    for (std::size_t b = 0; b < probs.size(); ++b) {
      if (probs[b] == 0.0) continue;
      step(s, xs[b], next);
      row.emplace_back(static_cast<std::uint32_t>(state_index(next, spec)), probs[b]);
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < row.size();) {
      std::size_t j = i;
      double p = 0.0;
      while (j < row.size() && row[j].first == row[i].first) p += row[j++].second;
      P.col.push_back(row[i].first);
      P.val.push_back(p);
      i = j;
    }
    P.row_start.push_back(P.col.size());
  }
  return P;
}

}  // namespace linenet
