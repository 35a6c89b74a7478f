#pragma once

// Synchronous primitives the arithmetic circuits are wired from: logic
// gates, a Fibonacci LFSR, T-type random flip-flops, a saturating up/down
// counter and a magnitude comparator. Every stateful element advances once
// per clock bin.

#include <cstdint>
#include <span>
#include <vector>

#include "rpc/core.hpp"

namespace rpc {

Bit gate_and(std::span<const Bit> inputs);
Bit gate_or(std::span<const Bit> inputs);
inline Bit gate_not(Bit input) { return !input; }

/// Fibonacci linear feedback shift register.
///
/// Taps are 1-based bit positions; the feedback bit is the XOR of the tapped
/// bits and is shifted in at bit 0 while the word moves one place towards the
/// MSB. The full N-bit word is readable in parallel after every shift.
class Lfsr {
 public:
  /// Register with the built-in maximal-length taps for `width`.
  explicit Lfsr(unsigned width, std::uint32_t seed = 1);
  Lfsr(unsigned width, std::vector<unsigned> taps, std::uint32_t seed);

  /// Maximal-length taps for `width`; throws ConfigError when none is tabulated.
  static const std::vector<unsigned>& maximal_taps(unsigned width);
  static bool has_maximal_taps(unsigned width);

  /// Shift once and return the new state, an integer in [1, 2^N - 1].
  std::uint32_t step();

  std::uint32_t state() const noexcept { return state_; }
  unsigned width() const noexcept { return width_; }
  const std::vector<unsigned>& taps() const noexcept { return taps_; }

 private:
  unsigned width_;
  std::vector<unsigned> taps_;
  std::uint32_t tap_mask_ = 0;
  std::uint32_t mask_ = 0;
  std::uint32_t state_;
};

/// Free-function form of Lfsr::step.
inline std::uint32_t lfsr_step(Lfsr& lfsr) { return lfsr.step(); }

/// T-type random flip-flop: an ordinary TFF whose clock acts with
/// probability 1/2. With T held high the output is an i.i.d. fair bit.
class Trff {
 public:
  explicit Trff(Bit q = false) : q_(q) {}

  Bit step(Bit t_input, Rng& rng) {
    if (t_input && rng.next_bit()) q_ = !q_;
    return q_;
  }
  Bit q() const noexcept { return q_; }

 private:
  Bit q_;
};

inline Bit trff_step(Trff& trff, Bit t_input, Rng& rng) { return trff.step(t_input, rng); }

/// N TRFFs with T held high, read in parallel as one word per clock.
class TrffBank {
 public:
  explicit TrffBank(unsigned width);

  std::uint32_t step(Rng& rng) {
    word_ ^= rng.next_bits(width_);
    return word_;
  }
  unsigned width() const noexcept { return width_; }

 private:
  unsigned width_;
  std::uint32_t word_ = 0;
};

/// N-bit up/down counter that neither counts above 2^N - 1 nor below 0.
class SaturatingCounter {
 public:
  static constexpr unsigned kMaxWidth = 24;

  explicit SaturatingCounter(unsigned width, std::uint32_t value = 0);

  /// Net change inc - dec, then clamp into [0, 2^N - 1].
  void update(Bit inc, Bit dec) {
    if (inc == dec) return;
    if (inc) {
      if (value_ < max_) ++value_;
    } else if (value_ > 0) {
      --value_;
    }
  }

  std::uint32_t value() const noexcept { return value_; }
  std::uint32_t max() const noexcept { return max_; }
  unsigned width() const noexcept { return width_; }
  Bit msb() const noexcept { return (value_ >> (width_ - 1)) & 1u; }

 private:
  unsigned width_;
  std::uint32_t max_;
  std::uint32_t value_;
};

inline SaturatingCounter counter_update(SaturatingCounter state, Bit inc, Bit dec) {
  state.update(inc, dec);
  return state;
}

/// 1 iff r < c. Both operands must fit in `width` bits.
Bit magnitude_less(std::uint32_t r, std::uint32_t c, unsigned width);

/// Fresh uniform integer on [0, 2^width - 1].
std::uint32_t uniform_word(unsigned width, Rng& rng);

}  // namespace rpc
