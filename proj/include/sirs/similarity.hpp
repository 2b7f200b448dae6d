#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sirs/core.hpp"

namespace sirs {

/// Daily-sampled case counts. `t0_label` is the calendar date of values[0]
/// when known (ISO yyyy-mm-dd).
struct CaseSeries {
  Eigen::VectorXd values;
  std::optional<std::string> t0_label;

  CaseSeries() = default;
  explicit CaseSeries(Eigen::VectorXd v, std::optional<std::string> label = std::nullopt)
      : values(std::move(v)), t0_label(std::move(label)) {}
  CaseSeries(std::initializer_list<double> v);

  Eigen::Index size() const { return values.size(); }
};

/// Population-moment Pearson correlation. Throws kLengthMismatch (also for
/// length < 2) and kZeroVariance.
double pearson(const CaseSeries& x, const CaseSeries& y);

/// Σ x_i y_i / (|x| |y|). Throws kLengthMismatch and kZeroNorm.
double cosine(const CaseSeries& x, const CaseSeries& y);

/// First-order temporal correlation: cosine of the increment vectors.
/// Throws kLengthMismatch and kZeroIncrementNorm.
double cort(const CaseSeries& x, const CaseSeries& y);

/// First differences x_{t+1} - x_t.
Eigen::VectorXd increments(const CaseSeries& x);

/// Delays `sim` by `shift` samples against `obs` (sim[t] is compared with
/// obs[t + shift]) and truncates both to the common window. Throws
/// kOutOfRange for a negative shift and kNoOverlap when fewer than two
/// samples remain.
std::pair<CaseSeries, CaseSeries> align_and_shift(const CaseSeries& sim, const CaseSeries& obs,
                                                  int shift);

struct SimilarityReport {
  double pearson = 0.0;
  double cosine = 0.0;
  double cort = 0.0;
  int shift = 0;
  /// Observed-series sample range [first, last] that was compared.
  std::pair<Eigen::Index, Eigen::Index> window{0, 0};
};

SimilarityReport compare_series(const CaseSeries& sim, const CaseSeries& obs, int shift);

/// {"pearson":..,"cosine":..,"cort":..,"shift":..,"window":[a,b]}
std::string to_json(const SimilarityReport& r);

}  // namespace sirs
