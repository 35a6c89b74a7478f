#include "rpc/core.hpp"

#include <cmath>
#include <string>

namespace rpc {

Probability::Probability(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("probability " + std::to_string(p) + " outside [0,1]");
  }
}

void SimulationConfig::validate() const {
  if (cycles == 0) throw ConfigError("cycles must be at least 1");
}

std::uint64_t feedback_warmup(unsigned width) { return std::uint64_t{16} << width; }

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t master_seed, std::uint64_t element_id) {
  // seed_seq mixes all words, so (seed, id) pairs that differ in any word
  // land on unrelated engine states.
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(element_id),
                    static_cast<std::uint32_t>(element_id >> 32), 0x52504354u};
  Rng rng(0);
  rng.engine_.seed(seq);
  return rng;
}

Bit Rng::next_bit() {
  if (available_ == 0) {
    buffer_ = engine_();
    available_ = 64;
  }
  const Bit b = (buffer_ & 1u) != 0;
  buffer_ >>= 1;
  --available_;
  return b;
}

std::uint32_t Rng::next_bits(unsigned n) {
  if (n == 0 || n > 32) throw DomainError("next_bits width must be in [1,32]");
  if (available_ < n) {
    buffer_ = engine_();
    available_ = 64;
  }
  const auto word = static_cast<std::uint32_t>(buffer_ & ((std::uint64_t{1} << n) - 1));
  buffer_ >>= n;
  available_ -= n;
  return word;
}

Bitstream::Bitstream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw DomainError("bit value outside {0,1}");
    ones_ += b;
  }
}

Probability estimate_probability(const Bitstream& stream) {
  if (stream.empty()) throw DomainError("cannot estimate probability of an empty stream");
  return Probability(static_cast<double>(stream.ones()) / static_cast<double>(stream.size()));
}

}  // namespace rpc
