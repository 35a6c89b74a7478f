#include "rpc/elements.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>

namespace rpc {

namespace {

// Maximal-length Fibonacci taps. Widths 3-8, 10 and 12 use the polynomials
// the circuits were characterised with; the rest fill in the sweepable range.
const std::map<unsigned, std::vector<unsigned>>& tap_table() {
  static const std::map<unsigned, std::vector<unsigned>> table = {
      {1, {1}},
      {2, {2, 1}},
      {3, {3, 2}},
      {4, {4, 3}},
      {5, {5, 3}},
      {6, {6, 5}},
      {7, {7, 6}},
      {8, {8, 6, 5, 4}},
      {9, {9, 5}},
      {10, {10, 7}},
      {11, {11, 9}},
      {12, {12, 11, 10, 4}},
      {13, {13, 4, 3, 1}},
      {14, {14, 5, 3, 1}},
      {15, {15, 14}},
      {16, {16, 15, 13, 4}},
  };
  return table;
}

}  // namespace

Bit gate_and(std::span<const Bit> inputs) {
  if (inputs.size() < 2) throw ConfigError("AND gate needs at least 2 inputs");
  return std::all_of(inputs.begin(), inputs.end(), [](Bit b) { return b; });
}

Bit gate_or(std::span<const Bit> inputs) {
  if (inputs.size() < 2) throw ConfigError("OR gate needs at least 2 inputs");
  return std::any_of(inputs.begin(), inputs.end(), [](Bit b) { return b; });
}

const std::vector<unsigned>& Lfsr::maximal_taps(unsigned width) {
  const auto& table = tap_table();
  auto it = table.find(width);
  if (it == table.end()) {
    throw ConfigError("no maximal-length LFSR taps tabulated for width " + std::to_string(width));
  }
  return it->second;
}

bool Lfsr::has_maximal_taps(unsigned width) { return tap_table().count(width) != 0; }

Lfsr::Lfsr(unsigned width, std::uint32_t seed) : Lfsr(width, maximal_taps(width), seed) {}

Lfsr::Lfsr(unsigned width, std::vector<unsigned> taps, std::uint32_t seed)
    : width_(width), taps_(std::move(taps)), state_(seed) {
  if (width_ == 0 || width_ > 32) throw ConfigError("LFSR width must be in [1,32]");
  if (taps_.empty()) throw ConfigError("LFSR needs at least one tap");
  mask_ = width_ == 32 ? 0xffffffffu : ((1u << width_) - 1);
  for (unsigned t : taps_) {
    if (t == 0 || t > width_) throw ConfigError("LFSR tap " + std::to_string(t) + " out of range");
    tap_mask_ |= 1u << (t - 1);
  }
  if ((state_ & mask_) != state_) throw ConfigError("LFSR seed wider than the register");
  if (state_ == 0) throw ConfigError("LFSR seed 0 is the lockup state");
}

std::uint32_t Lfsr::step() {
  const std::uint32_t feedback = std::popcount(state_ & tap_mask_) & 1u;
  state_ = ((state_ << 1) | feedback) & mask_;
  return state_;
}

TrffBank::TrffBank(unsigned width) : width_(width) {
  if (width_ == 0 || width_ > 32) throw ConfigError("TRFF bank width must be in [1,32]");
}

SaturatingCounter::SaturatingCounter(unsigned width, std::uint32_t value)
    : width_(width), max_(0), value_(value) {
  if (width_ == 0 || width_ > kMaxWidth) {
    throw ConfigError("counter width must be in [1," + std::to_string(kMaxWidth) + "]");
  }
  max_ = (1u << width_) - 1;
  if (value_ > max_) throw ConfigError("counter initial value exceeds 2^N - 1");
}

Bit magnitude_less(std::uint32_t r, std::uint32_t c, unsigned width) {
  if (width == 0 || width > 32) throw DomainError("comparator width must be in [1,32]");
  const std::uint64_t limit = std::uint64_t{1} << width;
  if (r >= limit || c >= limit) throw DomainError("comparator operand exceeds 2^N - 1");
  return r < c;
}

std::uint32_t uniform_word(unsigned width, Rng& rng) { return rng.next_bits(width); }

}  // namespace rpc
