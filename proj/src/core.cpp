#include "sirs/core.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace sirs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNegativeParameter: return "NegativeParameter";
    case ErrorCode::kNonPositiveRate: return "NonPositiveRate";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kTooFewNodes: return "TooFewNodes";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kZeroIncrementNorm: return "ZeroIncrementNorm";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kNonContiguousDates: return "NonContiguousDates";
    case ErrorCode::kNonNumericValue: return "NonNumericValue";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& field,
                           const std::string& detail) {
  std::string msg = to_string(code);
  if (!field.empty()) msg += "(" + field + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string field, const std::string& detail)
    : std::runtime_error(format_message(code, field, detail)),
      code_(code),
      field_(std::move(field)) {}

const EpidemicParams& validate_params(const EpidemicParams& p) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw Error(ErrorCode::kOutOfRange, field, what);
  };
  // NaN fails every comparison below, so it is rejected too.
  require(p.beta >= 0.0 && p.beta <= 1.0, "beta", "must lie in [0, 1]");
  require(p.gamma >= 0.0 && std::isfinite(p.gamma), "gamma", "must be >= 0");
  require(p.alpha >= 0.0 && std::isfinite(p.alpha), "alpha", "must be >= 0");
  require(p.lambda_in >= 0.0 && std::isfinite(p.lambda_in), "lambda_in",
          "must be >= 0");
  require(p.revive_frac >= 0.0 && p.revive_frac < 1.0, "revive_frac",
          "must lie in [0, 1)");
  require(p.protect_intensity >= 0.0 && std::isfinite(p.protect_intensity),
          "protect_intensity", "must be >= 0");
  return p;
}

EpidemicParams base_population_params() {
  EpidemicParams p;
  p.beta = 0.001;
  p.gamma = 0.7;
  p.alpha = 0.8;
  p.lambda_in = 3.0;
  p.revive_frac = 0.995;
  p.protect_intensity = 1.0;
  return p;
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

std::uint64_t RandomSource::poisson(double mu) {
  if (mu == 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mu)(engine_);
}

double RandomSource::exponential(double rate) {
  // 1 - u lies in (0, 1], so the log is finite and the draw positive unless
  // u == 0 exactly, which maps to the smallest representable positive gap.
  const double u = uniform();
  const double x = -std::log1p(-u) / rate;
  return x > 0.0 ? x : std::numeric_limits<double>::denorm_min();
}

std::uint64_t RandomSource::split() { return mix_seed(engine_()); }

std::uint64_t sample_poisson(RandomSource& rs, double mu) {
  if (!(mu >= 0.0)) throw Error(ErrorCode::kNegativeParameter, "mu");
  return rs.poisson(mu);
}

double sample_exponential(RandomSource& rs, double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::kNonPositiveRate, "rate");
  return rs.exponential(rate);
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace sirs
