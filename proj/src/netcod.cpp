#include "linenet/netcod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "linenet/sim.hpp"

namespace linenet::netcod {

Row nc_transmit(const GaloisField& F, const CodedBuffer& buf, CounterRng& rng) {
  Row out(buf.width(), 0);
  for (const auto& row : buf.rows) {
    const auto a = F.random(rng);
    if (a == 0) continue;
    for (std::size_t k = 0; k < out.size(); ++k)
      if (row[k]) out[k] ^= F.mul(a, row[k]);
  }
  return out;
}

void nc_receive(const GaloisField& F, CodedBuffer& buf, const Row& pkt, CounterRng& rng) {
  if (pkt.size() != buf.width()) throw ValidationError("packet width does not match the buffer");
  for (auto& row : buf.rows) {
    const auto b = F.random(rng);
    if (b == 0) continue;
    for (std::size_t k = 0; k < row.size(); ++k)
      if (pkt[k]) row[k] ^= F.mul(b, pkt[k]);
  }
}

CodedBuffer nc_receive(const GaloisField& F, const CodedBuffer& buf, const Row& pkt, CounterRng& rng) {
  CodedBuffer out = buf;
  nc_receive(F, out, pkt, rng);
  return out;
}

CodedLine::CodedLine(const NetworkSpec& spec, const GaloisField& F) : spec_(spec), F_(F) {
  spec_.validate();
  for (int m : spec_.buffers) bufs_.push_back(CodedBuffer::zeros(m, 0));
}

void CodedLine::add_coordinate() {
  for (auto& b : bufs_)
    for (auto& r : b.rows) r.push_back(0);
  ++width_;
}

void CodedLine::eliminate(const Row& pkt) {
  std::size_t p = 0;
  while (pkt[p] == 0) ++p;
  const auto inv = F_.inv(pkt[p]);
  for (auto& b : bufs_) {
    for (auto& r : b.rows) {
      if (r[p] != 0) {
        const auto f = F_.mul(r[p], inv);
        for (std::size_t k = 0; k < width_; ++k)
          if (pkt[k]) r[k] ^= F_.mul(f, pkt[k]);
      }
      r.erase(r.begin() + static_cast<long>(p));
    }
  }
  --width_;
}

void CodedLine::rebase() {
  // Reduced echelon form of all buffered rows; pivot columns give coordinates
  // of every buffered vector in that basis.
  std::vector<Row> rows;
  for (const auto& b : bufs_)
    for (const auto& r : b.rows) rows.push_back(r);
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < width_ && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const auto inv = F_.inv(rows[rank][c]);
    for (auto& v : rows[rank]) v = F_.mul(v, inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const auto f = rows[r][c];
      for (std::size_t k = 0; k < width_; ++k)
        if (rows[rank][k]) rows[r][k] ^= F_.mul(f, rows[rank][k]);
    }
    pivots.push_back(c);
    ++rank;
  }
  for (auto& b : bufs_) {
    for (auto& r : b.rows) {
      Row nr(pivots.size());
      for (std::size_t i = 0; i < pivots.size(); ++i) nr[i] = r[pivots[i]];
      r.swap(nr);
    }
  }
  width_ = pivots.size();
}

int CodedLine::step(const ChannelRealization& x, CounterRng& rng) {
  const int h = spec_.hops();
  if (x[0]) add_coordinate();
  msgs_.resize(h - 1);
  for (int j = 0; j < h - 1; ++j) msgs_[j] = nc_transmit(F_, bufs_[j], rng);
  // Relay updates in reverse-hop order; they read only pre-epoch messages.
  for (int i = h - 2; i >= 1; --i)
    if (x[i]) nc_receive(F_, bufs_[i], msgs_[i - 1], rng);
  if (x[0]) {
    Row fresh(width_, 0);
    fresh[width_ - 1] = 1;
    nc_receive(F_, bufs_[0], fresh, rng);
  }
  int grew = 0;
  if (x[h - 1]) {
    Row pkt = msgs_[h - 2];
    pkt.resize(width_, 0);
    if (std::any_of(pkt.begin(), pkt.end(), [](auto v) { return v != 0; })) {
      eliminate(pkt);
      ++dest_rank_;
      grew = 1;
    }
  }
  std::size_t slots = 0;
  for (int m : spec_.buffers) slots += static_cast<std::size_t>(m);
  if (width_ > 2 * slots + 4) rebase();
  return grew;
}

std::vector<int> CodedLine::eta() const {
  const int r = static_cast<int>(bufs_.size());
  std::vector<int> suffix(r + 1, 0);
  std::vector<Row> stack;
  for (int i = r - 1; i >= 0; --i) {
    for (const auto& row : bufs_[i].rows) stack.push_back(row);
    suffix[i] = rank_of(F_, stack);
  }
  std::vector<int> out(r);
  for (int i = 0; i < r; ++i) out[i] = suffix[i] - suffix[i + 1];
  return out;
}

NoFeedbackStats simulate_no_feedback(const NetworkSpec& spec, FieldSpec field, long epochs, long warmup,
                                     std::uint64_t seed) {
  spec.validate();
  if (warmup < 0) warmup = sim::default_warmup(epochs);
  if (!(epochs > warmup)) throw ValidationError("need epochs > warmup >= 0");
  GaloisField F(field.q);
  CodedLine line(spec, F);
  NoFeedbackStats st;
  st.q = field.q;
  st.seed = seed;
  st.epochs_total = epochs;
  st.warmup = warmup;
  st.epochs_run = epochs - warmup;
  const int r = spec.relays();
  st.eta_mean.assign(r, 0.0);
  st.eta_histograms.resize(r);
  for (int j = 0; j < r; ++j) st.eta_histograms[j].assign(spec.buffers[j] + 1, 0);
  CounterRng chan(seed, 0), coef(seed, 1);
  ChannelRealization x;
  const int nb = static_cast<int>(std::min<long>(100, st.epochs_run));
  std::vector<double> batch(nb, 0.0);
  for (long l = 0; l < epochs; ++l) {
    sample_channels(spec, chan, x);
    const int grew = line.step(x, coef);
    st.max_width = std::max(st.max_width, line.width());
    if (l < warmup) continue;
    st.innovative += grew;
    batch[(l - warmup) * nb / st.epochs_run] += grew;
    const auto eta = line.eta();
    for (int j = 0; j < r; ++j) {
      if (eta[j] < 0 || eta[j] > spec.buffers[j]) throw InconsistencyError("innovative count outside [0, m]");
      ++st.eta_histograms[j][eta[j]];
      st.eta_mean[j] += eta[j];
    }
  }
  st.rate = static_cast<double>(st.innovative) / static_cast<double>(st.epochs_run);
  for (auto& v : st.eta_mean) v /= static_cast<double>(st.epochs_run);
  double mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    const long lo = b * st.epochs_run / nb, hi = (b + 1) * st.epochs_run / nb;
    batch[b] /= static_cast<double>(hi - lo);
    mean += batch[b];
  }
  mean /= nb;
  double ss = 0.0;
  for (double v : batch) ss += (v - mean) * (v - mean);
  st.rate_se = nb > 1 ? std::sqrt(ss / (nb - 1) / nb) : 0.0;
  return st;
}

EtaComparison eta_transition_comparison(const NetworkSpec& spec, FieldSpec field, long epochs, std::uint64_t seed) {
  spec.validate();
  const std::uint64_t n = spec.state_count();
  if (n > 4096) throw CapacityExceededError("transition comparison limited to 4096 states");
  const auto P = emc::build(spec);
  GaloisField F(field.q);
  CodedLine line(spec, F);
  CounterRng chan(seed, 0), coef(seed, 1);
  ChannelRealization x;
  std::vector<long> counts(n * n, 0), rows(n, 0);
  std::uint64_t prev = state_index(line.eta(), spec);
  EtaComparison out;
  for (long l = 0; l < epochs; ++l) {
    sample_channels(spec, chan, x);
    line.step(x, coef);
    const std::uint64_t cur = state_index(line.eta(), spec);
    ++counts[prev * n + cur];
    ++rows[prev];
    ++out.transitions;
    prev = cur;
  }
  out.min_row_count = std::numeric_limits<long>::max();
  for (std::uint64_t s = 0; s < n; ++s) {
    if (rows[s] == 0) continue;
    ++out.rows_visited;
    out.min_row_count = std::min(out.min_row_count, rows[s]);
    for (std::uint64_t t = 0; t < n; ++t) {
      const double emp = static_cast<double>(counts[s * n + t]) / static_cast<double>(rows[s]);
      out.distance = std::max(out.distance, std::abs(emp - P.at(s, t)));
    }
  }
  if (out.rows_visited == 0) out.min_row_count = 0;
  return out;
}

}  // namespace linenet::netcod
