#include "rlncsim/coding.hpp"

#include <cmath>
#include <stdexcept>

namespace rlncsim {

CodedPacket encode(const std::vector<std::vector<std::uint8_t>>& block,
                   const GfField& field, Rng& rng) {
  if (block.empty()) throw std::invalid_argument("block must be nonempty");
  const std::size_t m = block.front().size();
  for (const auto& pkt : block) {
    if (pkt.size() != m) {
      throw std::invalid_argument("source packets must have equal length");
    }
  }
  std::uniform_int_distribution<unsigned> coeff(0, field.order() - 1);
  CodedPacket out;
  out.coefficients.resize(block.size());
  out.payload.assign(m, 0);
  for (std::size_t j = 0; j < block.size(); ++j) {
    const auto c = static_cast<std::uint8_t>(coeff(rng));
    out.coefficients[j] = c;
    if (c == 0) continue;
    for (std::size_t s = 0; s < m; ++s) {
      out.payload[s] = field.add(out.payload[s], field.mul(c, block[j][s]));
    }
  }
  return out;
}

Decoder::Decoder(long k, const GfField& field) : k_(k), field_(&field) {
  if (k_ < 1) throw std::invalid_argument("block size must be >= 1");
  rows_.resize(static_cast<std::size_t>(k_));
}

bool Decoder::ingest(const CodedPacket& pkt) {
  if (static_cast<long>(pkt.coefficients.size()) != k_) {
    throw std::invalid_argument("coefficient vector length mismatch");
  }
  ++received_;
  std::vector<std::uint8_t> row = pkt.coefficients;
  for (long c = 0; c < k_; ++c) {
    if (row[c] == 0) continue;
    auto& pivot = rows_[static_cast<std::size_t>(c)];
    if (pivot.empty()) {
      // Normalize so the pivot entry is 1.
      const std::uint8_t invc = field_->inv(row[c]);
      for (auto& x : row) x = field_->mul(x, invc);
      pivot = std::move(row);
      ++rank_;
      return true;
    }
    const std::uint8_t factor = row[c];
    for (long j = c; j < k_; ++j) {
      row[j] = field_->add(row[j], field_->mul(factor, pivot[j]));
    }
  }
  return false;
}

double full_rank_probability(long k, long d) {
  if (k < 1 || d < 2) throw std::invalid_argument("need k >= 1 and d >= 2");
  double prod = 1.0;
  double pow_d = 1.0;
  for (long i = 1; i <= k; ++i) {
    pow_d /= static_cast<double>(d);  // d^-i
    prod *= 1.0 - pow_d;
    if (pow_d == 0.0) break;
  }
  return prod;
}

long lt_threshold(long k, double delta, double c) {
  if (k < 1) throw std::invalid_argument("block size must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("decode failure probability must be in (0,1)");
  }
  if (c < 0.0) throw std::invalid_argument("threshold constant must be >= 0");
  const double l = std::log(static_cast<double>(k) / delta);
  const double nu = static_cast<double>(k) +
                    c * std::sqrt(static_cast<double>(k)) * l * l;
  return static_cast<long>(std::ceil(nu));
}

long model_block_size(const DecodeModel& model) {
  return std::visit([](const auto& m) { return m.k; }, model);
}

long model_receptions_required(const DecodeModel& model) {
  if (const auto* lt = std::get_if<LtThreshold>(&model)) {
    return lt->threshold();
  }
  return model_block_size(model);
}

}  // namespace rlncsim
