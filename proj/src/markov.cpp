#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rpc/analysis.hpp"

namespace rpc {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Probability that the counter moves up / down from state c in one bin.
struct Moves {
  double up;
  double down;
};

Moves moves(CircuitKind kind, std::uint32_t c, std::uint32_t states, double p0, double p1) {
  const double q0 = 1.0 - p0;
  const double q1 = 1.0 - p1;
  switch (kind) {
    case CircuitKind::DivCounter:
      // z = [C > 0]; inc = a, dec = z AND b.
      if (c == 0) return {p0, 0.0};
      return {p0 * q1, q0 * p1};
    case CircuitKind::DivTrff:
    case CircuitKind::SubDivTrff: {
      // z ~ Bernoulli(C / 2^N) independent of a, b.
      const double z = static_cast<double>(c) / static_cast<double>(states);
      return {p0 * (1.0 - z * p1), q0 * z * p1};
    }
    case CircuitKind::SubCounter:
      // (1,0) counts, (0,1) decrements when C > 0; coincident pairs cancel.
      return {p0 * q1, c > 0 ? q0 * p1 : 0.0};
    case CircuitKind::Comparator:
      return {p0 * q1, q0 * p1};
    default:
      break;
  }
  throw DomainError("oracle unsupported for pseudorandom state");
}

double output_given(CircuitKind kind, std::uint32_t c, std::uint32_t states, double p0, double p1) {
  switch (kind) {
    case CircuitKind::DivCounter:
      return c > 0 ? 1.0 : 0.0;
    case CircuitKind::DivTrff:
      return static_cast<double>(c) / static_cast<double>(states);
    case CircuitKind::SubDivTrff:
      return p1 * (1.0 - static_cast<double>(c) / static_cast<double>(states));
    case CircuitKind::SubCounter:
      return c == 0 ? p1 * (1.0 - p0) : 0.0;
    case CircuitKind::Comparator:
      return c >= states / 2 ? 1.0 : 0.0;
    default:
      break;
  }
  throw DomainError("oracle unsupported for pseudorandom state");
}

Eigen::Map<const Matrix> as_matrix(const ChainSpec& chain) {
  const auto n = static_cast<Eigen::Index>(chain.states());
  return Eigen::Map<const Matrix>(chain.transition.data(), n, n);
}

bool interior(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

bool has_oracle(CircuitKind kind) {
  switch (kind) {
    case CircuitKind::DivTrff:
    case CircuitKind::SubDivTrff:
    case CircuitKind::DivCounter:
    case CircuitKind::SubCounter:
    case CircuitKind::Comparator:
      return true;
    default:
      return false;
  }
}

ChainSpec build_chain(CircuitKind kind, unsigned width, Probability p0, Probability p1) {
  if (kind == CircuitKind::DivLfsr || kind == CircuitKind::SubDivLfsr) {
    throw DomainError("oracle unsupported for pseudorandom state");
  }
  if (!has_oracle(kind)) {
    throw DomainError("oracle unsupported for feedback-free circuit " + std::string(kind_name(kind)));
  }
  if (width == 0 || width > kMaxChainWidth) {
    throw DomainError("oracle counter width must be in [1," + std::to_string(kMaxChainWidth) + "]");
  }
  CircuitSpec spec{kind, 2, width, std::nullopt};

  ChainSpec chain;
  chain.kind = kind;
  chain.width = width;
  chain.p0 = p0;
  chain.p1 = p1;
  chain.start = spec.start_count();
  const std::uint32_t n = std::uint32_t{1} << width;
  chain.transition.assign(std::size_t{n} * n, 0.0);
  chain.output.resize(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    auto [up, down] = moves(kind, c, n, p0, p1);
    // Saturation: a blocked move leaves the counter where it is.
    if (c == n - 1) up = 0.0;
    if (c == 0) down = 0.0;
    double* row = &chain.transition[std::size_t{c} * n];
    if (c + 1 < n) row[c + 1] = up;
    if (c > 0) row[c - 1] = down;
    row[c] = 1.0 - up - down;
    chain.output[c] = output_given(kind, c, n, p0, p1);
  }
  return chain;
}

std::vector<double> stationary_distribution(const ChainSpec& chain) {
  const auto n = static_cast<Eigen::Index>(chain.states());
  const auto p = as_matrix(chain);
  Eigen::RowVectorXd pi;

  if (interior(chain.p0) && interior(chain.p1)) {
    // pi (P - I) = 0 with one equation swapped for sum(pi) = 1.
    Matrix a = p.transpose() - Matrix::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    pi = x.transpose();
    // Two power steps polish rounding noise from the solve.
    for (int i = 0; i < 2; ++i) pi = pi * p;
  } else {
    // Some moves have probability 0 and the chain may be reducible. The
    // long-run distribution from the start state is e_start P^t for large t;
    // P^(2^k) by repeated squaring reaches t = 2^48 in 48 products.
    Matrix power = p;
    Eigen::RowVectorXd start = Eigen::RowVectorXd::Zero(n);
    start(chain.start) = 1.0;
    Eigen::RowVectorXd previous = start * power;
    for (int k = 0; k < 48; ++k) {
      power = (power * power).eval();
      pi = start * power;
      if ((pi - previous).cwiseAbs().maxCoeff() < 1e-15 && k > 4) break;
      previous = pi;
    }
    const Eigen::RowVectorXd next = pi * p;
    if ((next - pi).cwiseAbs().maxCoeff() > 1e-9) {
      throw DomainError("degenerate chain has no limiting distribution");
    }
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return std::vector<double>(pi.data(), pi.data() + n);
}

double stationary_output(const ChainSpec& chain) {
  const auto pi = stationary_distribution(chain);
  double rate = 0.0;
  for (std::size_t c = 0; c < pi.size(); ++c) rate += pi[c] * chain.output[c];
  return std::clamp(rate, 0.0, 1.0);
}

double stationary_residual(const ChainSpec& chain, std::span<const double> pi) {
  const auto n = static_cast<Eigen::Index>(chain.states());
  if (static_cast<Eigen::Index>(pi.size()) != n) throw DomainError("distribution size mismatch");
  Eigen::Map<const Eigen::RowVectorXd> v(pi.data(), n);
  return (v * as_matrix(chain) - v).cwiseAbs().maxCoeff();
}

}  // namespace rpc
