#include <cmath>
#include <set>

#include "doctest.h"
#include "rpc/core.hpp"
#include "rpc/errors.hpp"

using namespace rpc;

TEST_CASE("probability rejects values outside the unit interval") {
  CHECK(Probability(0.0).value() == 0.0);
  CHECK(Probability(1.0).value() == 1.0);
  CHECK_THROWS_AS(Probability(-1e-9), DomainError);
  CHECK_THROWS_AS(Probability(1.0 + 1e-9), DomainError);
  CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
}

TEST_CASE("zero cycles is a config error") {
  SimulationConfig c;
  c.cycles = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.cycles = 1;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("feedback warmup is sixteen counter ranges") {
  CHECK(feedback_warmup(4) == 256);
  CHECK(feedback_warmup(8) == 4096);
}

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_word() == b.next_word());
  Rng c(42), d(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.next_bit() == d.next_bit());
}

TEST_CASE("derived sub-streams differ by element id and by master seed") {
  std::set<std::uint64_t> first;
  for (std::uint64_t id = 0; id < 64; ++id) first.insert(Rng::derive(1, id).next_word());
  CHECK(first.size() == 64);
  CHECK(Rng::derive(1, 0).next_word() != Rng::derive(2, 0).next_word());
  CHECK(Rng::derive(5, 9).next_word() == Rng::derive(5, 9).next_word());
}

TEST_CASE("next_bits stays within range and is roughly uniform") {
  Rng rng(3);
  std::vector<int> hist(16, 0);
  const int n = 160000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.next_bits(4);
    REQUIRE(v < 16u);
    ++hist[v];
  }
  // each bucket ~ Binomial(n, 1/16), sd ~ 97
  for (int h : hist) CHECK(std::abs(h - n / 16) < 500);
  CHECK_THROWS(rng.next_bits(0));
  CHECK_THROWS(rng.next_bits(33));
}

TEST_CASE("next_unit lies in [0,1)") {
  Rng rng(11);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bernoulli source endpoints are deterministic") {
  BernoulliSource zero(Probability(0.0), Rng(1));
  BernoulliSource one(Probability(1.0), Rng(1));
  for (int i = 0; i < 100000; ++i) {
    REQUIRE_FALSE(zero.step());
    REQUIRE(one.step());
  }
}

TEST_CASE("bernoulli source rate within 4 sigma") {
  for (double p : {0.01, 0.3, 0.5, 0.77, 0.999}) {
    BernoulliSource src(Probability(p), Rng::derive(7, static_cast<std::uint64_t>(p * 1000)));
    const int m = 1 << 20;
    int ones = 0;
    for (int i = 0; i < m; ++i) ones += src.step();
    const double sigma = std::sqrt(p * (1 - p) / m);
    CHECK(std::abs(double(ones) / m - p) < 4 * sigma);
  }
}

TEST_CASE("bernoulli threshold resolution") {
  CHECK(pulse_threshold(0.0) == 0);
  CHECK(pulse_threshold(1.0) == (std::uint64_t{1} << 32));
  CHECK(pulse_threshold(0.5) == (std::uint64_t{1} << 31));
}

TEST_CASE("bitstream bookkeeping") {
  Bitstream s;
  s.push_back(true);
  s.push_back(false);
  s.push_back(true);
  CHECK(s.size() == 3);
  CHECK(s.ones() == 2);
  CHECK(s[0]);
  CHECK_FALSE(s[1]);
  CHECK(estimate_probability(s).value() == doctest::Approx(2.0 / 3));
  CHECK(s == Bitstream({1, 0, 1}));
  CHECK_THROWS_AS(Bitstream({0, 2}), DomainError);
  CHECK_THROWS_AS(estimate_probability(Bitstream{}), DomainError);
}
