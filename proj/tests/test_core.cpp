#include "doctest.h"

#include <cmath>
#include <vector>

#include "sirs/core.hpp"

using namespace sirs;

namespace {

EpidemicParams make(double b, double g, double a, double l, double p, double mu) {
  EpidemicParams e;
  e.beta = b;
  e.gamma = g;
  e.alpha = a;
  e.lambda_in = l;
  e.revive_frac = p;
  e.protect_intensity = mu;
  return e;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIoError;
}

std::string field_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("validate_params accepts the base set and the zero boundary") {
  const auto base = make(0.001, 0.7, 0.8, 3, 0.995, 1);
  CHECK(validate_params(base) == base);
  const auto zero = make(0, 0, 0, 0, 0, 0);
  CHECK(validate_params(zero) == zero);
  CHECK(base_population_params() == make(0.001, 0.7, 0.8, 3, 0.995, 1));
}

TEST_CASE("validate_params names the first bad field") {
  CHECK(field_of([] { validate_params(make(1.5, 0.7, 0.8, 3, 0.5, 0)); }) == "beta");
  CHECK(field_of([] { validate_params(make(0.1, -1, 0.8, 3, 0.5, 0)); }) == "gamma");
  CHECK(field_of([] { validate_params(make(0.1, 1, -0.8, 3, 0.5, 0)); }) == "alpha");
  CHECK(field_of([] { validate_params(make(0.1, 1, 0.8, -3, 0.5, 0)); }) == "lambda_in");
  CHECK(field_of([] { validate_params(make(0.1, 1, 0.8, 3, 1.0, 0)); }) == "revive_frac");
  CHECK(field_of([] { validate_params(make(0.1, 1, 0.8, 3, 0.5, -1)); }) == "protect_intensity");
  CHECK(code_of([] { validate_params(make(1.5, 0.7, 0.8, 3, 0.5, 0)); }) == ErrorCode::kOutOfRange);
  CHECK(field_of([] { validate_params(make(NAN, 0.7, 0.8, 3, 0.5, 0)); }) == "beta");
}

TEST_CASE("poisson sampler") {
  RandomSource rs(11);
  CHECK(sample_poisson(rs, 0.0) == 0u);
  CHECK(code_of([&] { sample_poisson(rs, -0.1); }) == ErrorCode::kNegativeParameter);

  constexpr int n = 1'000'000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += static_cast<double>(sample_poisson(rs, 1.0));
  CHECK(std::abs(sum / n - 1.0) < 0.01);

  double s1 = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(sample_poisson(rs, 2.0));
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  CHECK(std::abs((s2 / n - mean * mean) - 2.0) < 0.05);
}

TEST_CASE("exponential sampler") {
  RandomSource rs(12);
  CHECK(code_of([&] { sample_exponential(rs, 0.0); }) == ErrorCode::kNonPositiveRate);
  CHECK(code_of([&] { sample_exponential(rs, -1.0); }) == ErrorCode::kNonPositiveRate);

  constexpr int n = 1'000'000;
  double sum = 0.0;
  bool positive = true;
  for (int k = 0; k < n; ++k) {
    const double x = sample_exponential(rs, 2.0);
    sum += x;
    positive = positive && x > 0.0;
  }
  CHECK(positive);
  CHECK(std::abs(sum / n - 0.5) < 0.005);

  int above = 0;
  for (int k = 0; k < n; ++k) above += sample_exponential(rs, 0.7) > 1.0;
  CHECK(std::abs(static_cast<double>(above) / n - std::exp(-0.7)) < 0.01);
  CHECK(sample_exponential(rs, 1.0) > 0.0);
}

TEST_CASE("uniform draws stay in range") {
  RandomSource rs(13);
  for (int k = 0; k < 100000; ++k) {
    const double u = rs.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(rs.uniform_index(7) < 7u);
  }
}

TEST_CASE("same seed gives the same mixed draw sequence") {
  auto draws = [](std::uint64_t seed) {
    RandomSource rs(seed);
    std::vector<double> out;
    for (int k = 0; k < 2000; ++k) {
      switch (k % 5) {
        case 0: out.push_back(rs.uniform()); break;
        case 1: out.push_back(static_cast<double>(rs.poisson(3.5))); break;
        case 2: out.push_back(rs.exponential(0.3)); break;
        case 3: out.push_back(static_cast<double>(rs.uniform_index(1000))); break;
        default: out.push_back(rs.bernoulli(0.4)); break;
      }
    }
    out.push_back(static_cast<double>(rs.split()));
    return out;
  };
  CHECK(draws(42) == draws(42));
  CHECK(draws(42) != draws(43));
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(140.0) == "140");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  RandomSource rs(5);
  for (int k = 0; k < 1000; ++k) {
    const double x = (rs.uniform() - 0.5) * std::pow(10.0, static_cast<double>(k % 30) - 15);
    REQUIRE(std::stod(format_double(x)) == x);
  }
}
