#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rlncsim/gf.hpp"
#include "rlncsim/rng.hpp"

namespace rlncsim {

/// One transmitted combination: length-k coefficient vector over GF(2^q)
/// plus the combined payload.
struct CodedPacket {
  std::vector<std::uint8_t> coefficients;
  std::vector<std::uint8_t> payload;
};

/// Draws i.i.d. uniform coefficients and forms the corresponding linear
/// combination of the block's source packets (all of equal length).
CodedPacket encode(const std::vector<std::vector<std::uint8_t>>& block,
                   const GfField& field, Rng& rng);

/// Rank-tracking decoder: incremental Gaussian elimination over GF(2^q).
/// Decoded once the coefficient rows span all of F_d^k.
class Decoder {
 public:
  Decoder(long k, const GfField& field);

  /// Returns true iff the packet increased the rank.
  bool ingest(const CodedPacket& pkt);

  long rank() const { return rank_; }
  long received() const { return received_; }
  bool decoded() const { return rank_ == k_; }
  long block_size() const { return k_; }

 private:
  long k_;
  const GfField* field_;
  long rank_ = 0;
  long received_ = 0;
  // rows_[c] is a reduced row with pivot at column c (empty if none yet).
  std::vector<std::vector<std::uint8_t>> rows_;
};

/// Probability that k uniform random vectors over F_d^k are independent:
/// prod_{i=1..k} (1 - d^-i). Always exceeds 1 - 1/(d-1).
double full_rank_probability(long k, long d);

/// Reception threshold of the LT model: ceil(k + c*sqrt(k)*ln^2(k/delta)).
/// The hidden constant of the O(.) is exposed as c (default 0.1 elsewhere).
long lt_threshold(long k, double delta, double c);

// Decode models used by the simulator.
struct Idealized {
  long k;  // decoded at exactly k receptions
};
struct RankBased {
  long k;
  unsigned q;  // field GF(2^q); decoded at rank k
};
struct LtThreshold {
  long k;
  double delta;  // per-block decode failure probability
  double c;      // threshold constant

  long threshold() const { return lt_threshold(k, delta, c); }
};
using DecodeModel = std::variant<Idealized, RankBased, LtThreshold>;

/// Source packets per block under the model.
long model_block_size(const DecodeModel& model);
/// Receptions a user must accumulate before the block can end for them.
long model_receptions_required(const DecodeModel& model);

}  // namespace rlncsim
