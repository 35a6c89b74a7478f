#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rpc/circuits.hpp"
#include "rpc/core.hpp"

namespace rpc {

// ---------------------------------------------------------------------------
// Transfer-function sweeps

/// `steps` evenly spaced interior points i / (steps + 1), i = 1..steps.
std::vector<double> grid_values(unsigned steps);

struct SweepCell {
  double p0 = 0.0;
  double p1 = 0.0;
  double estimate = 0.0;
  double ideal = 0.0;
  double abs_error = 0.0;
  /// abs_error / ideal, only where ideal > 0.05.
  std::optional<double> rel_error;
};

struct SweepResult {
  CircuitSpec spec;
  std::vector<double> grid;
  std::vector<SweepCell> cells;  // p0-major: cells[i * grid.size() + j] is (grid[i], grid[j])
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t argmax = 0;

  const SweepCell& worst() const { return cells.at(argmax); }
};

/// Simulates every (p0, p1) cell of `grid` x `grid`. Each cell runs with its
/// own seed derived from (config.seed, cell index), so the result does not
/// depend on `threads` (0 = hardware concurrency).
SweepResult sweep(const CircuitSpec& spec, std::span<const double> grid,
                  const SimulationConfig& config, unsigned threads = 0);

/// Seed used for cell `index` of a sweep run under `seed`.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Randomness of an output stream

struct RunHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;  // run length -> number of runs
  std::uint64_t runs = 0;
  std::uint64_t longest = 0;
};

/// Pearson chi-square of run lengths against the geometric law an i.i.d.
/// stream of the same rate would follow. Tail bins are pooled so that every
/// bin expects at least 5 runs. The first and last runs of the stream are
/// censored and left out.
struct RunChiSquare {
  double statistic = 0.0;
  unsigned bins = 0;
  unsigned dof = 0;
  double critical = 0.0;  // 99.9% quantile for `dof`
  bool exceeds() const { return statistic > critical; }
};

struct RandomnessReport {
  std::uint64_t length = 0;
  double rate = 0.0;
  std::vector<double> autocorrelation;  // autocorrelation[k - 1] = r_k
  RunHistogram one_runs;
  RunHistogram zero_runs;
  std::optional<RunChiSquare> zero_run_chi2;
  std::optional<RunChiSquare> one_run_chi2;
  std::uint64_t longest_run = 0;
  bool degenerate = false;  // rate 0 or 1

  /// Reference bound on |r_k| for an i.i.d. stream: 4 / sqrt(M).
  double iid_bound() const;
};

inline constexpr std::uint64_t kMinReportLength = 10'000;
inline constexpr unsigned kMaxLag = 64;

/// Biased (1/M-normalised) sample autocorrelation at lag `k`.
double autocorrelation(const Bitstream& stream, unsigned k);

RunChiSquare run_length_chi_square(const RunHistogram& runs, double continue_prob);

RandomnessReport randomness_report(const Bitstream& stream, unsigned max_lag);

/// 99.9% quantile of the chi-square distribution with `dof` degrees of freedom.
double chi_square_critical(unsigned dof, double level = 0.999);

// ---------------------------------------------------------------------------
// Exact Markov model of counter-based circuits

/// Per-bin transition matrix over counter states 0..2^N - 1, with the same
/// intra-bin order and saturation as the simulator.
struct ChainSpec {
  CircuitKind kind = CircuitKind::DivCounter;
  unsigned width = 0;
  double p0 = 0.0;
  double p1 = 0.0;
  std::uint32_t start = 0;
  std::vector<double> transition;  // row-major, states x states
  std::vector<double> output;      // P(output pulse | state)

  std::size_t states() const { return output.size(); }
  double at(std::size_t from, std::size_t to) const { return transition[from * states() + to]; }
};

inline constexpr unsigned kMaxChainWidth = 10;

/// Kinds with an exact chain: DivTrff, SubDivTrff, DivCounter, SubCounter,
/// Comparator. The LFSR variants are rejected: their random word is a
/// deterministic function of time, not an i.i.d. draw.
bool has_oracle(CircuitKind kind);

ChainSpec build_chain(CircuitKind kind, unsigned width, Probability p0, Probability p1);

/// Long-run state distribution. For p0, p1 in (0,1) the chain is irreducible
/// and this solves pi P = pi directly; otherwise some states are absorbing
/// and the limit of the start-state distribution is returned.
std::vector<double> stationary_distribution(const ChainSpec& chain);

/// sum_C pi(C) P(out | C).
double stationary_output(const ChainSpec& chain);

/// max_j |(pi P)_j - pi_j|.
double stationary_residual(const ChainSpec& chain, std::span<const double> pi);

}  // namespace rpc
