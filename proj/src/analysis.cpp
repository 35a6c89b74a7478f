#include "rpc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

namespace rpc {

std::vector<double> grid_values(unsigned steps) {
  if (steps < 2) throw DomainError("grid needs at least 2 steps");
  std::vector<double> grid(steps);
  for (unsigned i = 0; i < steps; ++i) grid[i] = static_cast<double>(i + 1) / (steps + 1);
  return grid;
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index) {
  return Rng::derive(seed, 0x5357'0000'0000ull + index).next_word();
}

SweepResult sweep(const CircuitSpec& spec, std::span<const double> grid,
                  const SimulationConfig& config, unsigned threads) {
  config.validate();
  spec.validate();
  if (spec.arity() != 2) throw ConfigError("sweeps cover two-input circuits only");
  for (double p : grid) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("sweep grid values must lie in (0,1)");
  }

  SweepResult result;
  result.spec = spec;
  result.grid.assign(grid.begin(), grid.end());
  const std::size_t n = grid.size();
  result.cells.resize(n * n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < n * n; idx = next++) {
      SweepCell& cell = result.cells[idx];
      cell.p0 = grid[idx / n];
      cell.p1 = grid[idx % n];
      SimulationConfig cfg = config;
      cfg.seed = cell_seed(config.seed, idx);
      const Probability in[2] = {Probability(cell.p0), Probability(cell.p1)};
      cell.estimate = measure_rate(spec, in, cfg);
      const double p[2] = {cell.p0, cell.p1};
      cell.ideal = ideal_output(spec.kind, p);
      cell.abs_error = std::abs(cell.estimate - cell.ideal);
      if (cell.ideal > 0.05) cell.rel_error = cell.abs_error / cell.ideal;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n * n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const double e = result.cells[i].abs_error;
    sum += e;
    if (e > result.max_abs_error) {
      result.max_abs_error = e;
      result.argmax = i;
    }
  }
  result.mean_abs_error = sum / static_cast<double>(result.cells.size());
  return result;
}

double RandomnessReport::iid_bound() const {
  return 4.0 / std::sqrt(static_cast<double>(length));
}

double autocorrelation(const Bitstream& stream, unsigned k) {
  const auto& x = stream.raw();
  const std::size_t m = x.size();
  if (k == 0 || k >= m) throw DomainError("lag must be in [1, M)");
  const double mean = static_cast<double>(stream.ones()) / static_cast<double>(m);
  const double var = mean * (1.0 - mean);
  if (var == 0.0) return 0.0;

  // For 0/1 data the lagged cross-sum reduces to coincidence counts.
  std::uint64_t both = 0;
  std::uint64_t head = 0;  // sum of x[t], t < m - k
  for (std::size_t t = 0; t + k < m; ++t) {
    both += x[t] & x[t + k];
    head += x[t];
  }
  std::uint64_t tail = 0;  // sum of x[t], t >= k
  for (std::size_t t = k; t < m; ++t) tail += x[t];

  const double pairs = static_cast<double>(m - k);
  const double cov = static_cast<double>(both) - mean * static_cast<double>(head + tail) +
                     pairs * mean * mean;
  return cov / (static_cast<double>(m) * var);
}

double chi_square_critical(unsigned dof, double level) {
  if (dof == 0) throw DomainError("chi-square needs at least one degree of freedom");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, level);
}

RunChiSquare run_length_chi_square(const RunHistogram& runs, double continue_prob) {
  if (!(continue_prob > 0.0 && continue_prob < 1.0)) {
    throw DomainError("geometric reference needs a continuation probability in (0,1)");
  }
  const double total = static_cast<double>(runs.runs);
  const double stop = 1.0 - continue_prob;
  auto expected_exact = [&](std::uint64_t k) {
    return total * stop * std::pow(continue_prob, static_cast<double>(k - 1));
  };
  auto expected_tail = [&](std::uint64_t k) {  // P(L >= k)
    return total * std::pow(continue_prob, static_cast<double>(k - 1));
  };

  // Exact bins 1..last, then one pooled bin L > last.
  std::uint64_t last = 0;
  while (expected_exact(last + 1) >= 5.0 && expected_tail(last + 2) >= 5.0) ++last;
  if (last == 0) throw DomainError("too few runs for a chi-square test");

  double stat = 0.0;
  std::uint64_t counted = 0;
  for (std::uint64_t k = 1; k <= last; ++k) {
    auto it = runs.counts.find(k);
    const double obs = it == runs.counts.end() ? 0.0 : static_cast<double>(it->second);
    counted += static_cast<std::uint64_t>(obs);
    const double e = expected_exact(k);
    stat += (obs - e) * (obs - e) / e;
  }
  const double obs_tail = static_cast<double>(runs.runs - counted);
  const double e_tail = expected_tail(last + 1);
  stat += (obs_tail - e_tail) * (obs_tail - e_tail) / e_tail;

  RunChiSquare out;
  out.statistic = stat;
  out.bins = static_cast<unsigned>(last + 1);
  // One parameter (the rate) is estimated from the stream.
  out.dof = out.bins >= 3 ? out.bins - 2 : 1;
  out.critical = chi_square_critical(out.dof);
  return out;
}

RandomnessReport randomness_report(const Bitstream& stream, unsigned max_lag) {
  if (stream.size() < kMinReportLength) {
    throw DomainError("stream too short for a randomness report (need " +
                      std::to_string(kMinReportLength) + " bins)");
  }
  if (max_lag < 1 || max_lag > kMaxLag) {
    throw DomainError("max lag must be in [1," + std::to_string(kMaxLag) + "]");
  }
  RandomnessReport report;
  report.length = stream.size();
  report.rate = static_cast<double>(stream.ones()) / static_cast<double>(stream.size());
  report.degenerate = stream.ones() == 0 || stream.ones() == stream.size();

  report.autocorrelation.resize(max_lag);
  for (unsigned k = 1; k <= max_lag; ++k) report.autocorrelation[k - 1] = autocorrelation(stream, k);

  // Full histograms include the edge runs; the chi-square tests drop them.
  const auto& x = stream.raw();
  RunHistogram inner_zero, inner_one;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= x.size(); ++t) {
    if (t < x.size() && x[t] == x[start]) continue;
    const std::uint64_t len = t - start;
    RunHistogram& h = x[start] ? report.one_runs : report.zero_runs;
    ++h.counts[len];
    ++h.runs;
    h.longest = std::max(h.longest, len);
    if (start != 0 && t != x.size()) {
      RunHistogram& inner = x[start] ? inner_one : inner_zero;
      ++inner.counts[len];
      ++inner.runs;
    }
    start = t;
  }
  report.longest_run = std::max(report.one_runs.longest, report.zero_runs.longest);

  if (!report.degenerate) {
    // A 0-run continues with probability 1 - p, a 1-run with probability p.
    auto try_chi2 = [](const RunHistogram& h, double cont) -> std::optional<RunChiSquare> {
      try {
        return run_length_chi_square(h, cont);
      } catch (const DomainError&) {
        return std::nullopt;
      }
    };
    report.zero_run_chi2 = try_chi2(inner_zero, 1.0 - report.rate);
    report.one_run_chi2 = try_chi2(inner_one, report.rate);
  }
  return report;
}

}  // namespace rpc
