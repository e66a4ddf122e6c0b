#pragma once

#include <cstdint>
#include <vector>

#include "linenet/rng.hpp"

namespace linenet {

// GF(2^k) for k in {1, 4, 8, 16}. Elements are the integers 0..q-1 in the
// polynomial basis; addition is XOR.
class GaloisField {
 public:
  using Element = std::uint32_t;

  explicit GaloisField(std::uint32_t q);

  std::uint32_t q() const { return q_; }
  int bits() const { return bits_; }

  static Element add(Element a, Element b) { return a ^ b; }
  Element mul(Element a, Element b) const {
    if (bits_ == 1) return a & b;
    if (!table_.empty()) return table_[(a << bits_) | b];
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Element inv(Element a) const;
  Element div(Element a, Element b) const { return mul(a, inv(b)); }

  Element random(CounterRng& rng) const { return static_cast<Element>(rng.below(q_)); }

 private:
  std::uint32_t q_;
  int bits_;
  std::vector<Element> exp_;
  std::vector<Element> log_;
  std::vector<Element> table_;  // full product table when q <= 256
};

using Row = std::vector<GaloisField::Element>;

// Rank of a set of rows (all of equal width).
int rank_of(const GaloisField& F, std::vector<Row> rows);

}  // namespace linenet
