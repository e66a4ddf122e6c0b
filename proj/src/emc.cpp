#include "linenet/emc.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "linenet/errors.hpp"

namespace linenet::emc {

std::vector<int> auxiliary_y(const OccupancyState& s, const ChannelRealization& x, const NetworkSpec& spec) {
  state_index(s, spec);
  const int h = spec.hops();
  OccupancyState n = s;
  std::vector<int> y(h);
  step_inplace(n.data(), x.data(), spec.buffers.data(), h, y.data());
  return y;
}

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

double capacity_from_stationary(const NetworkSpec& spec, const std::vector<double>& pi) {
  const std::uint64_t n = spec.state_count();
  const std::uint64_t block = n / (static_cast<std::uint64_t>(spec.buffers.back()) + 1);
  // States with an empty last relay are exactly the first block.
  double empty = 0.0;
  for (std::uint64_t k = 0; k < block; ++k) empty += pi[k];
  return spec.success(spec.hops() - 1) * (1.0 - empty);
}

ExactSolution solve(const NetworkSpec& spec, const StationaryOptions& opts, std::uint64_t state_cap) {
  ExactSolution out;
  out.stationary = stationary(build(spec, state_cap), opts);
  out.capacity = capacity_from_stationary(spec, out.stationary.pi);
  return out;
}

double capacity_exact(const NetworkSpec& spec, const StationaryOptions& opts, std::uint64_t state_cap) {
  return solve(spec, opts, state_cap).capacity;
}

std::vector<double> link_flows(const NetworkSpec& spec, const std::vector<double>& pi) {
  const int h = spec.hops();
  std::vector<double> flows(h > 2 ? h - 2 : 0, 0.0);
  if (flows.empty()) return flows;
  const auto probs = realization_probabilities(spec);
  std::vector<int> y(h);
  ChannelRealization x(h);
  for (std::uint64_t k = 0; k < spec.state_count(); ++k) {
    if (pi[k] == 0.0) continue;
    const OccupancyState s = index_state(k, spec);
    for (std::size_t b = 0; b < probs.size(); ++b) {
      for (int i = 0; i < h; ++i) x[i] = static_cast<std::uint8_t>(b >> i & 1);
      OccupancyState n = s;
      step_inplace(n.data(), x.data(), spec.buffers.data(), h, y.data());
      for (int i = 1; i + 1 < h; ++i)
        if (y[i]) flows[i - 1] += pi[k] * probs[b];
    }
  }
  return flows;
}

std::vector<double> capacity_flow_crosscheck(const NetworkSpec& spec, const StationaryOptions& opts,
                                             std::uint64_t state_cap) {
  const auto sol = solve(spec, opts, state_cap);
  auto flows = link_flows(spec, sol.stationary.pi);
  const double slack = 10.0 * std::max(opts.tol, sol.stationary.residual * static_cast<double>(spec.state_count()));
  for (std::size_t i = 0; i < flows.size(); ++i)
    if (std::abs(flows[i] - sol.capacity) > std::max(slack, 1e-11))
      throw InconsistencyError("flow over link " + std::to_string(i + 2) + " differs from capacity");
  return flows;
}

namespace {

using Mat = Eigen::MatrixXd;

// Dense block (from level a to level b) of P under the last-relay partition.
Mat block(const SparseStochasticMatrix& P, int L, int a, int b) {
  Mat out = Mat::Zero(L, L);
  const std::size_t row0 = static_cast<std::size_t>(a) * L;
  for (int r = 0; r < L; ++r) {
    const std::size_t row = row0 + r;
    for (std::size_t k = P.row_start[row]; k < P.row_start[row + 1]; ++k) {
      const long c = static_cast<long>(P.col[k]) - static_cast<long>(b) * L;
      if (c >= 0 && c < L) out(r, c) = P.val[k];
    }
  }
  return out;
}

bool upper_triangular(const Mat& A) {
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < r; ++c)
      if (A(r, c) != 0.0) return false;
  return true;
}

bool lower_triangular(const Mat& A) { return upper_triangular(A.transpose()); }

struct Blocks {
  int L = 0;
  int levels = 0;
  std::vector<Mat> down, stay, up;  // indexed by source level; down[0] and up[levels-1] unused
};

Blocks partition(const NetworkSpec& spec, std::uint64_t state_cap) {
  const auto P = build(spec, state_cap);
  Blocks b;
  b.levels = spec.buffers.back() + 1;
  b.L = static_cast<int>(spec.state_count() / b.levels);
  b.down.resize(b.levels);
  b.stay.resize(b.levels);
  b.up.resize(b.levels);
  for (int i = 0; i < b.levels; ++i) {
    b.stay[i] = block(P, b.L, i, i);
    if (i > 0) b.down[i] = block(P, b.L, i, i - 1);
    if (i + 1 < b.levels) b.up[i] = block(P, b.L, i, i + 1);
  }
  return b;
}

}  // namespace

Lemma1Report verify_lemma1(const NetworkSpec& spec, std::uint64_t state_cap) {
  spec.validate();
  const int h = spec.hops();
  const Blocks B = partition(spec, state_cap);
  Lemma1Report rep;
  rep.block_size = B.L;
  rep.levels = B.levels;

  rep.interior_equal = true;
  for (int i = 2; i < B.levels - 1; ++i) {
    if ((B.down[i] - B.down[1]).cwiseAbs().maxCoeff() > 1e-15 || (B.stay[i] - B.stay[1]).cwiseAbs().maxCoeff() > 1e-15 ||
        (B.up[i] - B.up[1]).cwiseAbs().maxCoeff() > 1e-15) {
      rep.interior_equal = false;
      throw StructuralError("interior blocks at level " + std::to_string(i) + " differ from level 1");
    }
  }

  double floor_base = spec.success(h - 1);
  for (int k = 0; k < h - 1; ++k) floor_base *= spec.eps[k];
  rep.down_det_floor = std::pow(floor_base, B.L);
  rep.down_upper_triangular = true;
  rep.down_min_det = std::numeric_limits<double>::infinity();
  for (int i = 1; i < B.levels; ++i) {
    if (!upper_triangular(B.down[i]))
      throw StructuralError("down block at level " + std::to_string(i) + " is not upper triangular");
    const double det = B.down[i].diagonal().prod();
    rep.down_min_det = std::min(rep.down_min_det, det);
    if (!(det >= rep.down_det_floor * (1.0 - 1e-12)) || det <= 0.0)
      throw StructuralError("down block at level " + std::to_string(i) + " has determinant below the floor");
  }
  if (h == 2) {
    const double expected = spec.success(1) * spec.eps[0];
    for (int i = 1; i < B.levels; ++i)
      if (std::abs(B.down[i](0, 0) - expected) > 1e-15)
        throw StructuralError("two-hop down block at level " + std::to_string(i) + " is not eps_bar_2 * eps_1");
  }

  rep.up_lower_triangular = true;
  rep.up_singular = true;
  for (int i = 0; i + 1 < B.levels; ++i) {
    if (!lower_triangular(B.up[i]))
      throw StructuralError("up block at level " + std::to_string(i) + " is not lower triangular");
    if (h > 2 && B.up[i](0, 0) != 0.0)
      throw StructuralError("up block at level " + std::to_string(i) + " is not singular");
  }
  if (h == 2) rep.up_singular = false;

  rep.stay_nonsingular = true;
  for (int i = 0; i < B.levels; ++i) {
    const Mat A = Mat::Identity(B.L, B.L) - B.stay[i];
    bool strict = false;
    for (int r = 0; r < B.L; ++r) {
      const double off = A.row(r).cwiseAbs().sum() - std::abs(A(r, r));
      if (A(r, r) < off - 1e-14)
        throw StructuralError("I - stay block at level " + std::to_string(i) + " is not diagonally dominant");
      if (A(r, r) > off + 1e-14) strict = true;
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (!strict || lu.rank() < B.L)
      throw StructuralError("I - stay block at level " + std::to_string(i) + " is singular");
  }
  return rep;
}

HMatrixBound h_matrix_bound(const NetworkSpec& spec, std::uint64_t state_cap) {
  spec.validate();
  const Blocks B = partition(spec, state_cap);
  const int L = B.L;
  const int top = B.levels - 1;
  // Balance for level i in row-vector form, transposed to act on x_i = pi_{T_i}^T:
  // down_{i+1}^T x_{i+1} = (I - stay_i)^T x_i - up_{i-1}^T x_{i-1}.
  std::vector<Mat> H(B.levels);
  H[0] = Mat::Identity(L, L);
  const Mat I = Mat::Identity(L, L);
  for (int i = 0; i < top; ++i) {
    Mat rhs = (I - B.stay[i]).transpose() * H[i];
    if (i > 0) rhs -= B.up[i - 1].transpose() * H[i - 1];
    const Mat Dt = B.down[i + 1].transpose();
    if (Dt.diagonal().cwiseAbs().minCoeff() == 0.0)
      throw StructuralError("down block at level " + std::to_string(i + 1) + " is singular");
    H[i + 1] = Dt.triangularView<Eigen::Lower>().solve(rhs);
  }
  Mat S = Mat::Zero(L, L);
  for (const auto& Hi : H) S += Hi;
  const double norm1 = S.cwiseAbs().colwise().sum().maxCoeff();

  HMatrixBound out;
  out.bound = spec.success(spec.hops() - 1) * (1.0 - 1.0 / norm1);
  const auto sol = solve(spec, {}, state_cap);
  out.exact = sol.capacity;
  Eigen::Map<const Eigen::VectorXd> pi(sol.stationary.pi.data(), static_cast<Eigen::Index>(sol.stationary.pi.size()));
  const Eigen::VectorXd x0 = pi.segment(0, L);
  for (int i = 0; i <= top; ++i) {
    const double r = (H[i] * x0 - pi.segment(static_cast<Eigen::Index>(i) * L, L)).cwiseAbs().maxCoeff();
    out.relation_residual = std::max(out.relation_residual, r);
  }
  return out;
}

}  // namespace linenet::emc
