#include "sirs/similarity.hpp"

#include <cmath>
#include "json.hpp"

namespace sirs {

CaseSeries::CaseSeries(std::initializer_list<double> v) : values(static_cast<Eigen::Index>(v.size())) {
  Eigen::Index k = 0;
  for (double x : v) values[k++] = x;
}

namespace {

void require_pair(const CaseSeries& x, const CaseSeries& y, Eigen::Index min_len) {
  if (x.size() != y.size())
    throw Error(ErrorCode::kLengthMismatch, "y",
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.size() < min_len)
    throw Error(ErrorCode::kLengthMismatch, "x", "need at least " + std::to_string(min_len) + " samples");
  if (!x.values.allFinite()) throw Error(ErrorCode::kNonNumericValue, "x");
  if (!y.values.allFinite()) throw Error(ErrorCode::kNonNumericValue, "y");
}

double clamp_unit(double v) { return std::fmax(-1.0, std::fmin(1.0, v)); }

}  // namespace

double pearson(const CaseSeries& x, const CaseSeries& y) {
  require_pair(x, y, 2);
  const Eigen::ArrayXd dx = x.values.array() - x.values.mean();
  const Eigen::ArrayXd dy = y.values.array() - y.values.mean();
  const double n = static_cast<double>(x.size());
  const double sx = std::sqrt(dx.square().sum() / n);
  const double sy = std::sqrt(dy.square().sum() / n);
  if (sx == 0.0) throw Error(ErrorCode::kZeroVariance, "x");
  if (sy == 0.0) throw Error(ErrorCode::kZeroVariance, "y");
  return clamp_unit((dx * dy).sum() / n / (sx * sy));
}

double cosine(const CaseSeries& x, const CaseSeries& y) {
  require_pair(x, y, 1);
  const double nx = x.values.norm(), ny = y.values.norm();
  if (nx == 0.0) throw Error(ErrorCode::kZeroNorm, "x");
  if (ny == 0.0) throw Error(ErrorCode::kZeroNorm, "y");
  return clamp_unit(x.values.dot(y.values) / (nx * ny));
}

Eigen::VectorXd increments(const CaseSeries& x) {
  const Eigen::Index n = x.size();
  if (n < 2) return {};
  return x.values.tail(n - 1) - x.values.head(n - 1);
}

double cort(const CaseSeries& x, const CaseSeries& y) {
  require_pair(x, y, 2);
  const Eigen::VectorXd dx = increments(x), dy = increments(y);
  const double nx = dx.norm(), ny = dy.norm();
  if (nx == 0.0) throw Error(ErrorCode::kZeroIncrementNorm, "x");
  if (ny == 0.0) throw Error(ErrorCode::kZeroIncrementNorm, "y");
  return clamp_unit(dx.dot(dy) / (nx * ny));
}

std::pair<CaseSeries, CaseSeries> align_and_shift(const CaseSeries& sim, const CaseSeries& obs,
                                                  int shift) {
  if (shift < 0) throw Error(ErrorCode::kOutOfRange, "shift", "must be >= 0");
  const Eigen::Index overlap = std::min(sim.size(), obs.size() - shift);
  if (overlap < 2) throw Error(ErrorCode::kNoOverlap, "shift");
  CaseSeries s(sim.values.head(overlap), sim.t0_label);
  CaseSeries o(obs.values.segment(shift, overlap));
  return {std::move(s), std::move(o)};
}

SimilarityReport compare_series(const CaseSeries& sim, const CaseSeries& obs, int shift) {
  const auto [s, o] = align_and_shift(sim, obs, shift);
  SimilarityReport r;
  r.pearson = pearson(o, s);
  r.cosine = cosine(o, s);
  r.cort = cort(o, s);
  r.shift = shift;
  r.window = {shift, shift + o.size() - 1};
  return r;
}

std::string to_json(const SimilarityReport& r) {
  nlohmann::ordered_json j;
  j["pearson"] = r.pearson;
  j["cosine"] = r.cosine;
  j["cort"] = r.cort;
  j["shift"] = r.shift;
  j["window"] = {r.window.first, r.window.second};
  return j.dump(2);
}

}  // namespace sirs
