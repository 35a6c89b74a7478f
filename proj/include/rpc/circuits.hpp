#pragma once

// Composite arithmetic circuits as clocked state machines.
//
// All circuits share one step contract: given this bin's input bits, return
// this bin's output bit and update internal state. Feedback circuits compute
// their output from the state held at the start of the bin; the counter
// update (net inc - dec, then clamp) happens afterwards. The output bit is
// therefore independent of the same bin's inputs.
//
// Divider wiring (LFSR and TRFF variants): the counter C holds the current
// guess of the quotient as C / 2^N. Each bin a random word R is compared
// against C, giving z = [R < C], a pulse train of rate ~C / 2^N. The counter
// counts up on every numerator pulse and down on every coincidence of z with
// a denominator pulse, so it settles where (C / 2^N) * p1 = p0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rpc/core.hpp"
#include "rpc/elements.hpp"

namespace rpc {

enum class CircuitKind {
  Mul,         // AND gate, n inputs
  OrAdd,       // OR gate, n inputs
  MuxAdd,      // random 2:1 multiplexer
  DivLfsr,     // comparator + counter, LFSR random word
  DivTrff,     // comparator + counter, TRFF random word
  DivCounter,  // counter only, output = [C > 0]
  SubDivLfsr,  // (NOT divider) AND p1, LFSR divider
  SubDivTrff,  // (NOT divider) AND p1, TRFF divider
  SubCounter,  // inhibit counter
  Comparator,  // up/down counter, output = MSB
};

std::string_view kind_name(CircuitKind kind);
/// Inverse of kind_name; throws DomainError for an unknown name.
CircuitKind parse_kind(std::string_view name);
const std::vector<CircuitKind>& all_kinds();

bool is_feedback(CircuitKind kind);
bool is_n_ary(CircuitKind kind);
/// Counter width used when none is given (0 for feedback-free circuits).
unsigned default_width(CircuitKind kind);

struct CircuitSpec {
  static constexpr unsigned kMaxInputs = 64;

  CircuitKind kind = CircuitKind::Mul;
  unsigned inputs = 2;  // only meaningful for Mul and OrAdd
  unsigned width = 0;   // counter width N; 0 selects default_width(kind)
  std::optional<std::uint32_t> initial_count;

  unsigned counter_width() const { return width != 0 ? width : default_width(kind); }
  unsigned arity() const { return is_n_ary(kind) ? inputs : 2; }
  /// Counter value at power-up: 2^(N-1) for comparator-based dividers and the
  /// comparator, 0 for the counter-only divider and the inhibit subtractor.
  std::uint32_t start_count() const;
  std::uint64_t warmup() const;
  void validate() const;
};

/// Mathematically ideal output probability: product, 1 - prod(1 - p),
/// (p0 + p1)/2, min(1, p0/p1), max(0, p1 - p0), or the step [p0 > p1].
double ideal_output(CircuitKind kind, std::span<const double> inputs);

class AndMultiplier {
 public:
  Bit step(std::span<const Bit> in) const { return gate_and(in); }
};

class OrAdder {
 public:
  Bit step(std::span<const Bit> in) const { return gate_or(in); }
};

class MuxAdder {
 public:
  explicit MuxAdder(Rng rng) : rng_(std::move(rng)) {}
  Bit step(Bit a, Bit b) { return select_.step(true, rng_) ? b : a; }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }

 private:
  Trff select_;
  Rng rng_;
};

/// Comparator-and-counter divider; the random word comes from an LFSR or a
/// bank of TRFFs.
class FeedbackDivider {
 public:
  FeedbackDivider(Lfsr lfsr, SaturatingCounter counter);
  FeedbackDivider(TrffBank bank, Rng rng, SaturatingCounter counter);

  Bit step(Bit a, Bit b) {
    const std::uint32_t r = next_word();
    const Bit z = r < counter_.value();
    counter_.update(a, z && b);
    return z;
  }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }
  const SaturatingCounter& counter() const noexcept { return counter_; }

 private:
  std::uint32_t next_word() {
    if (auto* lfsr = std::get_if<Lfsr>(&source_)) {
      const std::uint32_t r = lfsr->state();
      lfsr->step();
      return r;
    }
    return std::get<TrffBank>(source_).step(rng_);
  }

  std::variant<Lfsr, TrffBank> source_;
  Rng rng_;
  SaturatingCounter counter_;
};

class CounterDivider {
 public:
  explicit CounterDivider(SaturatingCounter counter) : counter_(counter) {}
  Bit step(Bit a, Bit b) {
    const Bit z = counter_.value() > 0;
    counter_.update(a, z && b);
    return z;
  }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }
  const SaturatingCounter& counter() const noexcept { return counter_; }

 private:
  SaturatingCounter counter_;
};

/// p1 - p0 = (1 - p0/p1) p1 with an embedded feedback divider.
class DivisionSubtractor {
 public:
  explicit DivisionSubtractor(FeedbackDivider divider) : divider_(std::move(divider)) {}
  Bit step(Bit a, Bit b) { return !divider_.step(a, b) && b; }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }
  const SaturatingCounter& counter() const noexcept { return divider_.counter(); }

 private:
  FeedbackDivider divider_;
};

/// Counts p0 pulses and inhibits as many p1 pulses; a coincident pair
/// cancels without touching the counter.
class CounterSubtractor {
 public:
  explicit CounterSubtractor(SaturatingCounter counter) : counter_(counter) {}
  Bit step(Bit a, Bit b) {
    if (a == b) return false;
    if (a) {
      counter_.update(true, false);
      return false;
    }
    if (counter_.value() > 0) {
      counter_.update(false, true);
      return false;
    }
    return true;
  }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }
  const SaturatingCounter& counter() const noexcept { return counter_; }

 private:
  SaturatingCounter counter_;
};

/// Up on p0, down on p1; pulses while the counter MSB is set.
class Comparator {
 public:
  explicit Comparator(SaturatingCounter counter) : counter_(counter) {}
  Bit step(Bit a, Bit b) {
    const Bit out = counter_.msb();
    counter_.update(a, b);
    return out;
  }
  Bit step(std::span<const Bit> in) { return step(in[0], in[1]); }
  /// The MSB as a steady logic level.
  Bit state_output() const noexcept { return counter_.msb(); }
  const SaturatingCounter& counter() const noexcept { return counter_; }

 private:
  SaturatingCounter counter_;
};

/// A circuit of any kind behind the common step interface.
class Circuit {
 public:
  using Impl = std::variant<AndMultiplier, OrAdder, MuxAdder, FeedbackDivider, CounterDivider,
                            DivisionSubtractor, CounterSubtractor, Comparator>;

  /// `rng` is the circuit's own sub-stream; it feeds TRFFs and MUX selects.
  Circuit(const CircuitSpec& spec, Rng rng);

  Bit step(std::span<const Bit> in);

  const CircuitSpec& spec() const noexcept { return spec_; }
  CircuitKind kind() const noexcept { return spec_.kind; }
  /// Counter of a feedback circuit; nullptr for gate-only circuits.
  const SaturatingCounter* counter() const;
  Impl& impl() noexcept { return impl_; }

 private:
  CircuitSpec spec_;
  Impl impl_;
};

Bit mul_step(Circuit& inst, std::span<const Bit> in);
Bit or_add_step(Circuit& inst, std::span<const Bit> in);
Bit mux_add_step(Circuit& inst, Bit a, Bit b);
Bit div_lfsr_step(Circuit& inst, Bit a, Bit b);
Bit div_trff_step(Circuit& inst, Bit a, Bit b);
Bit div_counter_step(Circuit& inst, Bit a, Bit b);
Bit sub_div_step(Circuit& inst, Bit a, Bit b);
Bit sub_counter_step(Circuit& inst, Bit a, Bit b);
Bit comparator_step(Circuit& inst, Bit a, Bit b);
Bit comparator_state_output(const Circuit& inst);

/// Sub-stream ids used by run_circuit: input i draws from `i`, the circuit
/// from kCircuitStreamId.
inline constexpr std::uint64_t kCircuitStreamId = 0x100;

/// Drive `spec` with independent Bernoulli sources, discard warmup bins and
/// record `config.cycles` output bits.
Bitstream run_circuit(const CircuitSpec& spec, std::span<const Probability> inputs,
                      const SimulationConfig& config);

/// Same simulation as run_circuit, returning only the output rate.
double measure_rate(const CircuitSpec& spec, std::span<const Probability> inputs,
                    const SimulationConfig& config);

}  // namespace rpc
