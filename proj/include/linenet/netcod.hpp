#pragma once

#include <cstdint>
#include <vector>

#include "linenet/galois.hpp"
#include "linenet/model.hpp"
#include "linenet/rng.hpp"

namespace linenet::netcod {

struct FieldSpec {
  std::uint32_t q = 65536;
};

// m coefficient rows over GF(q); payloads are not carried.
struct CodedBuffer {
  std::vector<Row> rows;

  static CodedBuffer zeros(int m, std::size_t width) { return {std::vector<Row>(m, Row(width, 0))}; }
  std::size_t width() const { return rows.empty() ? 0 : rows[0].size(); }
  int rank(const GaloisField& F) const { return rank_of(F, rows); }
};

// Uniformly random combination of the buffer rows.
Row nc_transmit(const GaloisField& F, const CodedBuffer& buf, CounterRng& rng);

// row_k += b_k * pkt for uniformly random b.
void nc_receive(const GaloisField& F, CodedBuffer& buf, const Row& pkt, CounterRng& rng);
CodedBuffer nc_receive(const GaloisField& F, const CodedBuffer& buf, const Row& pkt, CounterRng& rng);

// Whole line without feedback. Coefficients are kept modulo the destination's
// span (a delivered innovative row is eliminated from every buffer) and
// projected onto the span of the buffered rows, so the width stays bounded.
class CodedLine {
 public:
  CodedLine(const NetworkSpec& spec, const GaloisField& F);

  // One epoch: all messages come from the pre-epoch buffers. Returns 1 when
  // the destination span grows.
  int step(const ChannelRealization& x, CounterRng& rng);

  // eta_i = dim(span of relays i..h-2) - dim(span of relays i+1..h-2), modulo the destination span.
  std::vector<int> eta() const;

  long destination_rank() const { return dest_rank_; }
  std::size_t width() const { return width_; }
  const std::vector<CodedBuffer>& buffers() const { return bufs_; }

 private:
  void add_coordinate();
  void eliminate(const Row& pkt);
  void rebase();

  const NetworkSpec spec_;
  const GaloisField& F_;
  std::vector<CodedBuffer> bufs_;
  std::size_t width_ = 0;
  long dest_rank_ = 0;
  std::vector<Row> msgs_;
};

struct NoFeedbackStats {
  std::uint32_t q = 0;
  std::uint64_t seed = 0;
  long epochs_total = 0;
  long warmup = 0;
  long epochs_run = 0;
  long innovative = 0;  // destination rank growth after warm-up
  double rate = 0.0;
  double rate_se = 0.0;
  std::vector<double> eta_mean;                 // per relay
  std::vector<std::vector<long>> eta_histograms;
  std::size_t max_width = 0;
};

NoFeedbackStats simulate_no_feedback(const NetworkSpec& spec, FieldSpec field, long epochs, long warmup,
                                     std::uint64_t seed);

struct EtaComparison {
  double distance = 0.0;  // max |empirical - exact| over visited rows
  long rows_visited = 0;
  long min_row_count = 0;
  long transitions = 0;
};

EtaComparison eta_transition_comparison(const NetworkSpec& spec, FieldSpec field, long epochs, std::uint64_t seed);

}  // namespace linenet::netcod
