#pragma once

// Time-digitized random pulse trains.
//
// Time is a sequence of clock bins of unit width. A pulse train carries a
// number p in [0,1] as the probability that any given bin holds a pulse.
// Every stochastic element draws from its own deterministic sub-stream,
// derived from (master seed, element id), so a simulation is reproducible
// bit-for-bit and adding an element never perturbs the others.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rpc/errors.hpp"

namespace rpc {

/// Pulse present (true) or absent (false) in one clock bin.
using Bit = bool;

/// A pulse probability, checked to lie in [0,1] on construction.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double p);

  constexpr double value() const noexcept { return p_; }
  constexpr operator double() const noexcept { return p_; }

 private:
  double p_ = 0.0;
};

/// Clock-level parameters of one simulation run.
struct SimulationConfig {
  std::uint64_t cycles = std::uint64_t{1} << 20;  // measured bins M
  std::optional<std::uint64_t> warmup;            // discarded bins; nullopt = automatic
  std::uint64_t seed = 1;

  void validate() const;
};

/// Warmup for a feedback circuit whose counter has `width` bits: 16 * 2^width.
std::uint64_t feedback_warmup(unsigned width);

/// Seeded uniform random source. Words come from a 64-bit Mersenne Twister;
/// single bits and short words are served from a buffered word so that a
/// TRFF bit costs 1/64 of an engine call, and 32-bit draws use each engine
/// word twice.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent sub-stream for element `element_id` under `master_seed`.
  static Rng derive(std::uint64_t master_seed, std::uint64_t element_id);

  std::uint64_t next_word() { return engine_(); }
  Bit next_bit();
  /// `n` fresh uniform bits as an integer, 1 <= n <= 32.
  std::uint32_t next_bits(unsigned n);
  /// Uniform 32-bit word.
  std::uint32_t next_u32() {
    if (half_ready_) {
      half_ready_ = false;
      return static_cast<std::uint32_t>(half_ >> 32);
    }
    half_ = engine_();
    half_ready_ = true;
    return static_cast<std::uint32_t>(half_);
  }
  /// Uniform on [0,1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t buffer_ = 0;
  unsigned available_ = 0;
  std::uint64_t half_ = 0;
  bool half_ready_ = false;
};

/// p scaled to a 32-bit threshold: a uniform 32-bit word u gives a pulse iff
/// u < threshold, which happens with probability exactly threshold / 2^32.
inline std::uint64_t pulse_threshold(double p) {
  return static_cast<std::uint64_t>(p * 4294967296.0 + 0.5);
}

/// One bin of a Bernoulli pulse source: 1 with probability p.
inline Bit bernoulli_source_step(Probability p, Rng& rng) {
  return rng.next_u32() < pulse_threshold(p.value());
}

/// A time-digitized RPT generator bound to its own sub-stream.
class BernoulliSource {
 public:
  BernoulliSource(Probability p, Rng rng)
      : p_(p.value()), threshold_(pulse_threshold(p_)), rng_(std::move(rng)) {}
  Bit step() { return rng_.next_u32() < threshold_; }
  double probability() const noexcept { return p_; }

 private:
  double p_;
  std::uint64_t threshold_;
  Rng rng_;
};

/// Recorded output of a pulse train, one entry per measured bin.
class Bitstream {
 public:
  Bitstream() = default;
  explicit Bitstream(std::vector<std::uint8_t> bits);

  void reserve(std::size_t n) { bits_.reserve(n); }
  void push_back(Bit b) {
    bits_.push_back(b ? 1 : 0);
    ones_ += b ? 1 : 0;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  Bit operator[](std::size_t i) const { return bits_[i] != 0; }
  std::uint64_t ones() const noexcept { return ones_; }
  const std::vector<std::uint8_t>& raw() const noexcept { return bits_; }

  friend bool operator==(const Bitstream& a, const Bitstream& b) { return a.bits_ == b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::uint64_t ones_ = 0;
};

/// Fraction of bins holding a pulse. Throws DomainError on an empty stream.
Probability estimate_probability(const Bitstream& stream);

}  // namespace rpc
