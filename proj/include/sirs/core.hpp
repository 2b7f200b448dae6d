#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sirs {

enum class ErrorCode {
  kOutOfRange,
  kNegativeParameter,
  kNonPositiveRate,
  kConfigError,
  kTooFewNodes,
  kUnknownNode,
  kDivisionByZero,
  kSingularSystem,
  kEmptyWindow,
  kLengthMismatch,
  kZeroVariance,
  kZeroNorm,
  kZeroIncrementNorm,
  kNoOverlap,
  kParseError,
  kValidationError,
  kMissingColumn,
  kNonContiguousDates,
  kNonNumericValue,
  kIoError,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. `field()` names the offending
/// parameter, column, key or row when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

/// Epidemic states, integer codes 0/1/2.
enum class NodeState : std::uint8_t {
  kSusceptible = 0,
  kInfected = 1,
  kRecovered = 2,
};

constexpr int index_of(NodeState s) { return static_cast<int>(s); }

/// All model rates and probabilities.
///
/// `beta` is the per-contact infection probability (individual model) and
/// the per-pair infection rate factor (population model). `gamma` and
/// `alpha` are per-step probabilities in the individual model and rates per
/// unit time in the population model.
struct EpidemicParams {
  double beta = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double lambda_in = 0.0;
  double revive_frac = 0.0;
  double protect_intensity = 0.0;

  bool operator==(const EpidemicParams&) const = default;
};

/// Returns `p` unchanged when every invariant holds; throws
/// Error(kOutOfRange, <field>) for the first violated one.
const EpidemicParams& validate_params(const EpidemicParams& p);

/// Base population parameter set; configs/paper-base.json uses the same values.
EpidemicParams base_population_params();

/// Seeded generator plus the samplers the processes need.
///
/// Single owner; give every replication its own instance.
class RandomSource {
 public:
  using Engine = std::mt19937_64;

  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double q) { return uniform() < q; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t poisson(double mu);

  double exponential(double rate);

  /// Derives an independent child seed; used to fan a run seed out to
  /// sub-streams (graph, protection degrees, dynamics).
  std::uint64_t split();

  Engine& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  Engine engine_;
};

/// Poisson(mu) draw; mu = 0 returns 0. Throws kNegativeParameter for mu < 0.
std::uint64_t sample_poisson(RandomSource& rs, double mu);

/// Exponential draw with mean 1/rate. Throws kNonPositiveRate for rate <= 0.
double sample_exponential(RandomSource& rs, double rate);

/// Shortest round-trip decimal form, '.' separator, no locale.
std::string format_double(double x);

/// SplitMix64 finaliser, used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace sirs
