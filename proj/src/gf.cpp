#include "rlncsim/gf.hpp"

namespace rlncsim {

namespace {

// Primitive polynomials with x as a primitive element. q=8 is
// x^8 + x^4 + x^3 + x^2 + 1; the choice is recorded in output metadata so
// rank statistics are reproducible.
constexpr std::uint32_t kPoly[9] = {0,    0x3,  0x7,  0xB, 0x13,
                                    0x25, 0x43, 0x89, 0x11D};

}  // namespace

GfField::GfField(unsigned q) : q_(q) {
  if (q < 1 || q > 8) {
    throw std::invalid_argument("field order must be 2^q with q in 1..8");
  }
  order_ = 1u << q;
  poly_ = kPoly[q];
  if (q_ == 1) return;

  // exp_[i] = x^i, built by shift-and-reduce.
  unsigned v = 1;
  for (unsigned i = 0; i + 1 < order_; ++i) {
    exp_[i] = static_cast<std::uint8_t>(v);
    log_[v] = i;
    v <<= 1;
    if (v & order_) v ^= poly_;
  }
}

}  // namespace rlncsim
