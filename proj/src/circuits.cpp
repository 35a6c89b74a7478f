#include "rpc/circuits.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace rpc {

namespace {

struct KindInfo {
  CircuitKind kind;
  std::string_view name;
  bool feedback;
  unsigned width;
};

constexpr std::array<KindInfo, 10> kKinds = {{
    {CircuitKind::Mul, "mul", false, 0},
    {CircuitKind::OrAdd, "or-add", false, 0},
    {CircuitKind::MuxAdd, "mux-add", false, 0},
    {CircuitKind::DivLfsr, "div-lfsr", true, 8},
    {CircuitKind::DivTrff, "div-trff", true, 8},
    {CircuitKind::DivCounter, "div-counter", true, 8},
    {CircuitKind::SubDivLfsr, "sub-lfsr", true, 8},
    {CircuitKind::SubDivTrff, "sub-trff", true, 8},
    {CircuitKind::SubCounter, "sub-counter", true, 4},
    {CircuitKind::Comparator, "comparator", true, 8},
}};

const KindInfo& info(CircuitKind kind) {
  return *std::find_if(kKinds.begin(), kKinds.end(), [&](const KindInfo& k) { return k.kind == kind; });
}

FeedbackDivider make_divider(const CircuitSpec& spec, Rng rng) {
  const unsigned n = spec.counter_width();
  SaturatingCounter counter(n, spec.start_count());
  switch (spec.kind) {
    case CircuitKind::DivLfsr:
    case CircuitKind::SubDivLfsr:
      return FeedbackDivider(Lfsr(n), counter);
    default:
      return FeedbackDivider(TrffBank(n), std::move(rng), counter);
  }
}

Circuit::Impl make_impl(const CircuitSpec& spec, Rng rng) {
  switch (spec.kind) {
    case CircuitKind::Mul:
      return AndMultiplier{};
    case CircuitKind::OrAdd:
      return OrAdder{};
    case CircuitKind::MuxAdd:
      return MuxAdder(std::move(rng));
    case CircuitKind::DivLfsr:
    case CircuitKind::DivTrff:
      return make_divider(spec, std::move(rng));
    case CircuitKind::DivCounter:
      return CounterDivider(SaturatingCounter(spec.counter_width(), spec.start_count()));
    case CircuitKind::SubDivLfsr:
    case CircuitKind::SubDivTrff:
      return DivisionSubtractor(make_divider(spec, std::move(rng)));
    case CircuitKind::SubCounter:
      return CounterSubtractor(SaturatingCounter(spec.counter_width(), spec.start_count()));
    case CircuitKind::Comparator:
      return Comparator(SaturatingCounter(spec.counter_width(), spec.start_count()));
  }
  throw ConfigError("unknown circuit kind");
}

void require_kind(const Circuit& inst, std::initializer_list<CircuitKind> kinds, const char* op) {
  if (std::find(kinds.begin(), kinds.end(), inst.kind()) == kinds.end()) {
    throw ConfigError(std::string(op) + " applied to a " + std::string(kind_name(inst.kind())) +
                      " circuit");
  }
}

Bit step2(Circuit& inst, Bit a, Bit b) {
  const std::array<Bit, 2> in = {a, b};
  return inst.step(in);
}

}  // namespace

std::string_view kind_name(CircuitKind kind) { return info(kind).name; }

CircuitKind parse_kind(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw DomainError("unknown circuit kind '" + std::string(name) + "'");
}

const std::vector<CircuitKind>& all_kinds() {
  static const std::vector<CircuitKind> kinds = [] {
    std::vector<CircuitKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

bool is_feedback(CircuitKind kind) { return info(kind).feedback; }

bool is_n_ary(CircuitKind kind) { return kind == CircuitKind::Mul || kind == CircuitKind::OrAdd; }

unsigned default_width(CircuitKind kind) { return info(kind).width; }

std::uint32_t CircuitSpec::start_count() const {
  if (initial_count) return *initial_count;
  switch (kind) {
    case CircuitKind::DivLfsr:
    case CircuitKind::DivTrff:
    case CircuitKind::SubDivLfsr:
    case CircuitKind::SubDivTrff:
    case CircuitKind::Comparator:
      return std::uint32_t{1} << (counter_width() - 1);
    default:
      return 0;
  }
}

std::uint64_t CircuitSpec::warmup() const {
  return is_feedback(kind) ? feedback_warmup(counter_width()) : 0;
}

void CircuitSpec::validate() const {
  if (is_n_ary(kind) && (inputs < 2 || inputs > kMaxInputs)) {
    throw ConfigError(std::string(kind_name(kind)) + " needs between 2 and " +
                      std::to_string(kMaxInputs) + " inputs");
  }
  if (!is_feedback(kind)) return;
  const unsigned n = counter_width();
  if (n == 0 || n > SaturatingCounter::kMaxWidth) {
    throw ConfigError("counter width " + std::to_string(n) + " out of range");
  }
  if ((kind == CircuitKind::DivLfsr || kind == CircuitKind::SubDivLfsr) && !Lfsr::has_maximal_taps(n)) {
    throw ConfigError("no maximal-length LFSR for width " + std::to_string(n));
  }
  if (initial_count && *initial_count > (std::uint32_t{1} << n) - 1) {
    throw ConfigError("initial count exceeds 2^N - 1");
  }
}

double ideal_output(CircuitKind kind, std::span<const double> p) {
  if (p.size() < 2) throw DomainError("ideal output needs at least 2 inputs");
  if (!is_n_ary(kind) && p.size() != 2) throw DomainError("circuit takes exactly 2 inputs");
  switch (kind) {
    case CircuitKind::Mul: {
      double prod = 1.0;
      for (double x : p) prod *= x;
      return prod;
    }
    case CircuitKind::OrAdd: {
      double none = 1.0;
      for (double x : p) none *= 1.0 - x;
      return 1.0 - none;
    }
    case CircuitKind::MuxAdd:
      return 0.5 * (p[0] + p[1]);
    case CircuitKind::DivLfsr:
    case CircuitKind::DivTrff:
    case CircuitKind::DivCounter:
      if (p[0] >= p[1]) return p[0] > 0.0 || p[1] > 0.0 ? 1.0 : 0.0;
      return p[0] / p[1];
    case CircuitKind::SubDivLfsr:
    case CircuitKind::SubDivTrff:
    case CircuitKind::SubCounter:
      return std::max(0.0, p[1] - p[0]);
    case CircuitKind::Comparator:
      return p[0] > p[1] ? 1.0 : (p[0] < p[1] ? 0.0 : 0.5);
  }
  return 0.0;
}

FeedbackDivider::FeedbackDivider(Lfsr lfsr, SaturatingCounter counter)
    : source_(std::move(lfsr)), rng_(0), counter_(counter) {
  if (std::get<Lfsr>(source_).width() != counter_.width()) {
    throw ConfigError("LFSR and counter widths differ");
  }
}

FeedbackDivider::FeedbackDivider(TrffBank bank, Rng rng, SaturatingCounter counter)
    : source_(bank), rng_(std::move(rng)), counter_(counter) {
  if (bank.width() != counter_.width()) throw ConfigError("TRFF bank and counter widths differ");
}

Circuit::Circuit(const CircuitSpec& spec, Rng rng) : spec_(spec), impl_(AndMultiplier{}) {
  spec_.validate();
  impl_ = make_impl(spec_, std::move(rng));
}

Bit Circuit::step(std::span<const Bit> in) {
  if (in.size() != spec_.arity()) {
    throw ConfigError(std::string(kind_name(spec_.kind)) + " expects " +
                      std::to_string(spec_.arity()) + " inputs, got " + std::to_string(in.size()));
  }
  return std::visit([&](auto& c) { return c.step(in); }, impl_);
}

const SaturatingCounter* Circuit::counter() const {
  return std::visit(
      [](const auto& c) -> const SaturatingCounter* {
        if constexpr (requires { c.counter(); }) {
          return &c.counter();
        } else {
          return nullptr;
        }
      },
      impl_);
}

Bit mul_step(Circuit& inst, std::span<const Bit> in) {
  require_kind(inst, {CircuitKind::Mul}, "mul_step");
  return inst.step(in);
}

Bit or_add_step(Circuit& inst, std::span<const Bit> in) {
  require_kind(inst, {CircuitKind::OrAdd}, "or_add_step");
  return inst.step(in);
}

Bit mux_add_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::MuxAdd}, "mux_add_step");
  return step2(inst, a, b);
}

Bit div_lfsr_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::DivLfsr}, "div_lfsr_step");
  return step2(inst, a, b);
}

Bit div_trff_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::DivTrff}, "div_trff_step");
  return step2(inst, a, b);
}

Bit div_counter_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::DivCounter}, "div_counter_step");
  return step2(inst, a, b);
}

Bit sub_div_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::SubDivLfsr, CircuitKind::SubDivTrff}, "sub_div_step");
  return step2(inst, a, b);
}

Bit sub_counter_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::SubCounter}, "sub_counter_step");
  return step2(inst, a, b);
}

Bit comparator_step(Circuit& inst, Bit a, Bit b) {
  require_kind(inst, {CircuitKind::Comparator}, "comparator_step");
  return step2(inst, a, b);
}

Bit comparator_state_output(const Circuit& inst) {
  require_kind(inst, {CircuitKind::Comparator}, "comparator_state_output");
  return inst.counter()->msb();
}

namespace {

// Runs the clocked loop with the variant resolved once, outside the loop.
template <typename Sink>
void drive(const CircuitSpec& spec, std::span<const Probability> inputs,
           const SimulationConfig& config, Sink&& sink) {
  config.validate();
  spec.validate();
  if (inputs.size() != spec.arity()) {
    throw ConfigError(std::string(kind_name(spec.kind)) + " expects " +
                      std::to_string(spec.arity()) + " input probabilities, got " +
                      std::to_string(inputs.size()));
  }
  std::vector<BernoulliSource> sources;
  sources.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    sources.emplace_back(inputs[i], Rng::derive(config.seed, i));
  }
  Circuit circuit(spec, Rng::derive(config.seed, kCircuitStreamId));
  const std::uint64_t warmup = config.warmup.value_or(spec.warmup());
  const std::uint64_t total = warmup + config.cycles;
  std::array<Bit, CircuitSpec::kMaxInputs> in{};
  const std::span<const Bit> view(in.data(), inputs.size());

  std::visit(
      [&](auto& c) {
        for (std::uint64_t t = 0; t < total; ++t) {
          for (std::size_t i = 0; i < sources.size(); ++i) in[i] = sources[i].step();
          const Bit out = c.step(view);
          if (t >= warmup) sink(out);
        }
      },
      circuit.impl());
}

}  // namespace

Bitstream run_circuit(const CircuitSpec& spec, std::span<const Probability> inputs,
                      const SimulationConfig& config) {
  Bitstream stream;
  stream.reserve(config.cycles);
  drive(spec, inputs, config, [&](Bit b) { stream.push_back(b); });
  return stream;
}

double measure_rate(const CircuitSpec& spec, std::span<const Probability> inputs,
                    const SimulationConfig& config) {
  std::uint64_t ones = 0;
  drive(spec, inputs, config, [&](Bit b) { ones += b ? 1 : 0; });
  return static_cast<double>(ones) / static_cast<double>(config.cycles);
}

}  // namespace rpc
