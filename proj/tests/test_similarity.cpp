#include "doctest.h"

#include <cmath>

#include "json.hpp"
#include "sirs/similarity.hpp"

using namespace sirs;

namespace {

// Hand evaluation: pearson((1,2,4,3),(1,3,3,4)) = 3.5 / sqrt(5 * 4.75);
// cort((0,1,1,3),(0,2,1,2)) = 4 / sqrt(5 * 6).
constexpr double kPearsonPinned = 0.7181848464596079;
constexpr double kCortPinned = 0.7302967433402215;

CaseSeries random_series(RandomSource& rs, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = rs.uniform() * 100.0 - 20.0;
  return CaseSeries(v);
}

CaseSeries affine(const CaseSeries& x, double a, double b) {
  return CaseSeries(((x.values.array() * a) + b).matrix());
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("exact pearson cases") {
  CHECK(std::abs(pearson({1, 2, 3}, {2, 4, 6}) - 1.0) < 1e-12);
  CHECK(std::abs(pearson({1, 2, 3}, {3, 2, 1}) + 1.0) < 1e-12);
  CHECK(std::abs(pearson({1, 2, 4, 3}, {1, 3, 3, 4}) - kPearsonPinned) < 1e-9);
  CHECK(std::abs(kPearsonPinned - 3.5 / std::sqrt(23.75)) < 1e-15);
}

TEST_CASE("exact cosine cases") {
  CHECK(std::abs(cosine({3, 1, 2}, {3, 1, 2}) - 1.0) < 1e-12);
  CHECK(std::abs(cosine({1, 0}, {0, 1})) < 1e-12);
  CHECK(std::abs(cosine({1, 2, 2}, {2, 1, 2}) - 8.0 / 9.0) < 1e-9);
}

TEST_CASE("exact cort cases") {
  CHECK(std::abs(cort({1, 4, 2, 8}, {11, 14, 12, 18}) - 1.0) < 1e-12);
  CHECK(std::abs(cort({1, 4, 2, 8}, {1, -2, 0, -6}) + 1.0) < 1e-12);
  CHECK(std::abs(cort({0, 1, 1, 3}, {0, 2, 1, 2}) - kCortPinned) < 1e-9);
  CHECK(std::abs(kCortPinned - 4.0 / std::sqrt(30.0)) < 1e-15);
}

TEST_CASE("metric errors") {
  CHECK(code_of([] { pearson({1, 2, 3}, {1, 2}); }) == ErrorCode::kLengthMismatch);
  CHECK(code_of([] { pearson({1}, {1}); }) == ErrorCode::kLengthMismatch);
  CHECK(code_of([] { pearson({1, 1, 1}, {1, 2, 3}); }) == ErrorCode::kZeroVariance);
  CHECK(code_of([] { cosine({0, 0}, {1, 2}); }) == ErrorCode::kZeroNorm);
  CHECK(code_of([] { cort({2, 2, 2}, {1, 2, 3}); }) == ErrorCode::kZeroIncrementNorm);
  CHECK(code_of([] { cort({1, 2}, {1, 2, 3}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("align and shift") {
  const CaseSeries a{1, 2, 3, 4, 5}, b{9, 8, 7, 6, 5};
  const auto [s0, o0] = align_and_shift(a, b, 0);
  CHECK(s0.values == a.values);
  CHECK(o0.values == b.values);

  CaseSeries x(Eigen::VectorXd::LinSpaced(23, 0, 22)), y(Eigen::VectorXd::LinSpaced(23, 5, 27));
  const auto [s2, o2] = align_and_shift(x, y, 2);
  CHECK(s2.size() == 21);
  CHECK(o2.size() == 21);
  CHECK(x.size() == 23);

  CHECK(code_of([&] { align_and_shift(x, y, 22); }) == ErrorCode::kNoOverlap);
  CHECK(code_of([&] { align_and_shift(x, y, -1); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("delayed copy matches after the shift") {
  const CaseSeries sim{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  Eigen::VectorXd obs(13);
  obs << 7, 7, 7, 3, 1, 4, 1, 5, 9, 2, 6, 5, 3;
  const SimilarityReport r = compare_series(sim, CaseSeries(obs), 3);
  CHECK(std::abs(r.pearson - 1.0) < 1e-12);
  CHECK(std::abs(r.cosine - 1.0) < 1e-12);
  CHECK(std::abs(r.cort - 1.0) < 1e-12);
  CHECK(r.window == std::pair<Eigen::Index, Eigen::Index>{3, 12});

  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("shift") == 3);
  CHECK(j.at("window") == nlohmann::json::array({3, 12}));
  for (const char* k : {"pearson", "cosine", "cort"}) CHECK(j.contains(k));
}

TEST_CASE("property: symmetry, range and invariances") {
  RandomSource rs(401);
  for (int c = 0; c < 2000; ++c) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rs.uniform_index(40));
    const CaseSeries x = random_series(rs, n), y = random_series(rs, n);
    const double p = pearson(x, y), cs = cosine(x, y), ct = cort(x, y);
    REQUIRE(std::abs(p - pearson(y, x)) < 1e-12);
    REQUIRE(std::abs(cs - cosine(y, x)) < 1e-12);
    REQUIRE(std::abs(ct - cort(y, x)) < 1e-12);
    for (double v : {p, cs, ct}) REQUIRE((v >= -1.0 && v <= 1.0));

    const double a = 0.1 + rs.uniform() * 10.0, b = rs.uniform() * 50.0 - 25.0;
    if (n > 2) REQUIRE(std::abs(pearson(affine(x, a, b), y) - p) < 1e-9);
    REQUIRE(std::abs(cosine(affine(x, a, 0.0), y) - cs) < 1e-12);
    REQUIRE(std::abs(cort(affine(x, 1.0, b), y) - ct) < 1e-9);
  }
}

TEST_CASE("property: cort is the cosine of the increments") {
  RandomSource rs(402);
  for (int c = 0; c < 2000; ++c) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rs.uniform_index(60));
    const CaseSeries x = random_series(rs, n), y = random_series(rs, n);
    REQUIRE(std::abs(cort(x, y) - cosine(CaseSeries(increments(x)), CaseSeries(increments(y)))) < 1e-12);
  }
}
