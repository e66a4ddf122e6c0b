#include "linenet/galois.hpp"

#include "linenet/errors.hpp"

namespace linenet {

namespace {

std::uint32_t primitive_poly(int bits) {
  switch (bits) {
    case 4: return 0x13;
    case 8: return 0x11D;
    case 16: return 0x1100B;
  }
  return 0;
}

}  // namespace

GaloisField::GaloisField(std::uint32_t q) : q_(q) {
  switch (q) {
    case 2: bits_ = 1; break;
    case 16: bits_ = 4; break;
    case 256: bits_ = 8; break;
    case 65536: bits_ = 16; break;
    default: throw ValidationError("unsupported field size " + std::to_string(q) + " (2, 16, 256, 65536)");
  }
  if (bits_ == 1) return;
  const std::uint32_t poly = primitive_poly(bits_);
  exp_.assign(2 * q_, 0);
  log_.assign(q_, 0);
  std::uint32_t v = 1;
  for (std::uint32_t i = 0; i + 1 < q_; ++i) {
    exp_[i] = v;
    if (i > 0 && v == 1) throw std::logic_error("field polynomial is not primitive");
    log_[v] = i;
    v <<= 1;
    if (v & q_) v ^= poly;
  }
  for (std::uint32_t i = q_ - 1; i < 2 * q_; ++i) exp_[i] = exp_[i - (q_ - 1)];
  if (bits_ <= 8) {
    table_.assign(static_cast<std::size_t>(q_) * q_, 0);
    for (std::uint32_t a = 1; a < q_; ++a)
      for (std::uint32_t b = 1; b < q_; ++b) table_[(a << bits_) | b] = exp_[log_[a] + log_[b]];
  }
}

GaloisField::Element GaloisField::inv(Element a) const {
  if (a == 0) throw NumericError("zero has no inverse");
  if (bits_ == 1) return 1;
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

int rank_of(const GaloisField& F, std::vector<Row> rows) {
  if (rows.empty()) return 0;
  const std::size_t w = rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < w && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const auto inv = F.inv(rows[rank][c]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      const auto f = F.mul(rows[r][c], inv);
      for (std::size_t k = c; k < w; ++k) rows[r][k] ^= F.mul(f, rows[rank][k]);
    }
    ++rank;
  }
  return rank;
}

}  // namespace linenet
