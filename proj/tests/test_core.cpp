#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cmw/core.hpp"

using namespace cmw;

namespace {

// Two-term softmax written out by hand: p_0 = 1 / (1 + exp(z_1 - z_0)).
double two_term_first(double z0, double z1) { return 1.0 / (1.0 + std::exp(z1 - z0)); }

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("probability vector invariants") {
    CHECK_NOTHROW(ProbabilityVector({0.25, 0.75}));
    CHECK_THROWS_AS(ProbabilityVector({1.0}), InvalidInput);
    CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), InvalidInput);
    CHECK_THROWS_AS(ProbabilityVector({1.5, -0.5}), InvalidInput);
    CHECK_THROWS_AS(ProbabilityVector({NAN, 1.0}), InvalidInput);
    CHECK_NOTHROW(ProbabilityVector({0.5, 0.5 + 5e-10}));
  }

  TEST_CASE("loss vector range") {
    CHECK_NOTHROW(LossVector({0.0, 1.0}));
    CHECK_THROWS_AS(LossVector({-0.1, 0.5}), InvalidInput);
    CHECK_THROWS_AS(LossVector({0.5, 1.0001}), InvalidInput);
  }

  TEST_CASE("normalize_from_logits examples") {
    const auto half = normalize_from_logits(std::vector{0.0, 0.0});
    CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

    const double expected = two_term_first(0.0, -1.0);
    CHECK(expected == doctest::Approx(0.73106).epsilon(1e-5));
    const auto p = normalize_from_logits(std::vector{0.0, -1.0});
    CHECK(std::abs(p[0] - 0.73106) < 1e-5);
    CHECK(std::abs(p[1] - 0.26894) < 1e-5);

    const auto big = normalize_from_logits(std::vector{1000.0, 999.0});
    CHECK(std::abs(big[0] - p[0]) < 1e-12);
    CHECK(std::abs(big[1] - p[1]) < 1e-12);
  }

  TEST_CASE("normalize_from_logits rejects bad input") {
    CHECK_THROWS_AS(normalize_from_logits(std::vector<double>{0.0, INFINITY}), InvalidInput);
    CHECK_THROWS_AS(normalize_from_logits(std::vector<double>{NAN, 0.0}), InvalidInput);
    CHECK_THROWS_AS(normalize_from_logits(std::vector{0.0}), InvalidInput);
  }

  TEST_CASE("normalize_from_logits is shift invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logit(-50.0, 50.0), shift(-1e3, 1e3);
    std::uniform_int_distribution<std::size_t> width(2, 32);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> z(width(rng));
      for (double& x : z) x = logit(rng);
      const double c = shift(rng);
      std::vector<double> shifted = z;
      for (double& x : shifted) x += c;
      const auto a = normalize_from_logits(z);
      const auto b = normalize_from_logits(shifted);
      std::size_t arg_a = 0, arg_b = 0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-12);
        if (a[i] > a[arg_a]) arg_a = i;
        if (b[i] > b[arg_b]) arg_b = i;
      }
      CHECK(arg_a == arg_b);
    }
  }

  TEST_CASE("entropy examples") {
    CHECK(entropy(ProbabilityVector({1.0, 0.0, 0.0})) == 0.0);
    CHECK(entropy(ProbabilityVector::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(std::abs(entropy(ProbabilityVector({0.73106, 0.26894})) - 0.58220) < 1e-4);
  }

  TEST_CASE("entropy is at most log N with equality at uniform") {
    std::mt19937_64 rng(11);
    std::exponential_distribution<double> spacing(1.0);
    for (std::size_t n = 2; n <= 40; ++n) {
      CHECK(std::abs(entropy(ProbabilityVector::uniform(n)) - std::log(double(n))) <= 1e-12);
      for (int k = 0; k < 50; ++k) {
        std::vector<double> w(n);
        double total = 0.0;
        for (double& x : w) total += (x = spacing(rng));
        for (double& x : w) x /= total;
        const double h = entropy(ProbabilityVector(w));
        CHECK(h >= 0.0);
        CHECK(h < std::log(double(n)) - 1e-12);
      }
    }
  }

  TEST_CASE("step_size examples") {
    const auto adaptive = StepSchedule::default_adaptive(2);
    CHECK(std::abs(step_size(adaptive, 1) - 0.83255) < 1e-4);
    CHECK(step_size(adaptive, 4) == doctest::Approx(adaptive.parameter() / 2).epsilon(1e-15));
    const auto fixed = StepSchedule::fixed(0.2);
    for (std::uint64_t t : {1ULL, 2ULL, 1000ULL, 123456789ULL}) CHECK(step_size(fixed, t) == 0.2);
    CHECK_THROWS_AS(step_size(fixed, 0), InvalidInput);
    CHECK_THROWS_AS(StepSchedule::fixed(0.0), InvalidInput);
    CHECK_THROWS_AS(StepSchedule::adaptive(-1.0), InvalidInput);
  }

  TEST_CASE("adaptive schedule strictly decreases") {
    const auto s = StepSchedule::adaptive(1.3);
    for (std::uint64_t t = 1; t < 5000; ++t) CHECK(s.at(t + 1) < s.at(t));
  }

  TEST_CASE("translate examples") {
    CHECK(translate(LossVector({0.7, 0.3}), 0.3) == std::vector<double>{0.7 - 0.3, 0.0});
    CHECK(translate(LossVector({1.0, 1.0}), 1.0) == std::vector<double>{0.0, 0.0});
    const auto r = translate(LossVector({0.2, 0.9}), 0.9);
    CHECK(r[0] == doctest::Approx(-0.7));
    CHECK(r[1] == 0.0);
  }

  TEST_CASE("log_sum_exp matches direct evaluation") {
    const std::vector<double> v{0.1, -2.0, 1.5};
    double direct = 0.0;
    for (double x : v) direct += std::exp(x);
    CHECK(log_sum_exp(v) == doctest::Approx(std::log(direct)).epsilon(1e-14));
    CHECK(std::isfinite(log_sum_exp(std::vector{1e4, 1e4})));
  }
}
