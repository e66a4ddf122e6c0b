#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "linenet/errors.hpp"
#include "linenet/precision.hpp"

namespace linenet {

class DistinctParameterError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Signed combination of geometric pmfs on {1,2,...} plus an atom at 0:
// f(0) = atom, f(k) = sum_l p_l (1 - theta_l) theta_l^(k-1) for k >= 1.
// The atom is the convolution identity.
template <class Real>
struct BasicMixture {
  struct Term {
    Real p;
    Real theta;
  };

  Real atom = Real(0);
  std::vector<Term> terms;

  static BasicMixture geometric(const Real& theta) {
    BasicMixture m;
    m.terms.push_back({Real(1), theta});
    return m;
  }

  static BasicMixture identity() {
    BasicMixture m;
    m.atom = Real(1);
    return m;
  }

  Real weight_sum() const {
    Real s = atom;
    for (const auto& t : terms) s += t.p;
    return s;
  }

  Real mean() const {
    Real s(0);
    for (const auto& t : terms) s += t.p / (Real(1) - t.theta);
    return s;
  }

  Real second_moment() const {
    Real s(0);
    for (const auto& t : terms) {
      const Real s1 = Real(1) - t.theta;
      s += t.p * (Real(1) + t.theta) / (s1 * s1);
    }
    return s;
  }

  Real pmf(long k) const {
    if (k < 0) return Real(0);
    if (k == 0) return atom;
    using std::pow;
    Real s(0);
    for (const auto& t : terms) s += t.p * (Real(1) - t.theta) * pow(t.theta, static_cast<int>(k - 1));
    return s;
  }

  // Largest |p_l|.
  Real max_abs_weight() const {
    using std::abs;
    Real w = abs(atom);
    for (const auto& t : terms) w = std::max(w, Real(abs(t.p)));
    return w;
  }

  bool has_param(const Real& theta) const {
    return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.theta == theta; });
  }

  template <class Other>
  BasicMixture<Other> cast() const {
    BasicMixture<Other> out;
    out.atom = Other(atom);
    out.terms.reserve(terms.size());
    for (const auto& t : terms) out.terms.push_back({Other(t.p), Other(t.theta)});
    return out;
  }
};

using GeometricMixture = BasicMixture<double>;
using WideMixture = BasicMixture<WideReal>;

// Bilinear expansion using G(l) * G(u) = (1-l)/(u-l) G(u) + (1-u)/(l-u) G(l).
template <class Real>
BasicMixture<Real> gm_convolve(const BasicMixture<Real>& a, const BasicMixture<Real>& b) {
  for (const auto& x : a.terms)
    for (const auto& y : b.terms)
      if (x.theta == y.theta) throw DistinctParameterError("convolution operands share a geometric parameter");
  std::map<Real, Real> acc;
  auto add = [&](const Real& theta, const Real& w) {
    auto it = acc.find(theta);
    if (it == acc.end())
      acc.emplace(theta, w);
    else
      it->second += w;
  };
  for (const auto& x : a.terms) add(x.theta, x.p * b.atom);
  for (const auto& y : b.terms) add(y.theta, y.p * a.atom);
  for (const auto& x : a.terms) {
    for (const auto& y : b.terms) {
      const Real w = x.p * y.p;
      add(y.theta, w * (Real(1) - x.theta) / (y.theta - x.theta));
      add(x.theta, w * (Real(1) - y.theta) / (x.theta - y.theta));
    }
  }
  BasicMixture<Real> out;
  out.atom = a.atom * b.atom;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) out.terms.push_back({it->second, it->first});
  return out;
}

// Drops terms whose contribution |p|/(1-theta) to the mean is below rel * mean,
// then rescales all weights so they sum to one.
template <class Real>
void compact(BasicMixture<Real>& f, double rel = 1e-20) {
  using std::abs;
  const Real mean = abs(f.mean());
  std::vector<typename BasicMixture<Real>::Term> kept;
  for (const auto& t : f.terms)
    if (abs(t.p) / (Real(1) - t.theta) >= Real(rel) * mean) kept.push_back(t);
  f.terms.swap(kept);
  const Real s = f.weight_sum();
  f.atom /= s;
  for (auto& t : f.terms) t.p /= s;
}

}  // namespace linenet
