#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace rlncsim {

/// GF(2^q) arithmetic for q in 1..8, table based. Elements are the integers
/// 0..2^q-1; addition is XOR. For q >= 2 multiplication goes through
/// log/antilog tables built from a primitive polynomial with x primitive.
class GfField {
 public:
  explicit GfField(unsigned q);

  unsigned q() const { return q_; }
  unsigned order() const { return order_; }          // d = 2^q
  std::uint32_t polynomial() const { return poly_; }  // reduction polynomial

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const {
    return static_cast<std::uint8_t>(a ^ b);
  }

  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const {
    if (a == 0 || b == 0) return 0;
    if (q_ == 1) return 1;
    return exp_[(log_[a] + log_[b]) % (order_ - 1)];
  }

  std::uint8_t inv(std::uint8_t a) const {
    if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
    if (q_ == 1) return 1;
    return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
  }

  std::uint8_t div(std::uint8_t a, std::uint8_t b) const {
    return mul(a, inv(b));
  }

 private:
  unsigned q_;
  unsigned order_;
  std::uint32_t poly_;
  std::array<std::uint8_t, 255 * 2> exp_{};
  std::array<unsigned, 256> log_{};
};

}  // namespace rlncsim
