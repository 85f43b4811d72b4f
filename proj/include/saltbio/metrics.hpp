#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "saltbio/auth_core.hpp"

namespace saltbio {

/// Genuine and impostor match distances in [0, 1]; accept iff distance <= tau.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;

  /// Throws Error(domain) if any value lies outside [0, 1] or is NaN.
  void check_range() const;
};

/// Fraction of impostor distances <= tau.
double far(const ScoreSet& s, double tau);
/// Fraction of genuine distances > tau.
double frr(const ScoreSet& s, double tau);

struct RatePoint {
  double tau = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct DetPoint {
  double tau = 0.0;
  double far = 0.0;
  double frr = 0.0;
  double far_probit = 0.0;
  double frr_probit = 0.0;
};

inline constexpr double kDetClamp = 1e-6;

/// Inverse standard-normal CDF.
double probit(double p);

std::vector<RatePoint> roc_points(const ScoreSet& s, std::span<const double> taus);
/// Like roc_points, plus probit of each rate clamped to [eps, 1 - eps].
std::vector<DetPoint> det_points(const ScoreSet& s, std::span<const double> taus);

/// `steps + 1` evenly spaced thresholds from 0 to 1.
std::vector<double> uniform_grid(std::size_t steps);

struct EerResult {
  double tau = 0.0;
  double eer = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// Closest approach of FAR and FRR over the candidate thresholds (every
/// distinct observed distance plus 0 and 1). Ties go to the smallest tau; the
/// reported rate is (far + frr) / 2 at that tau.
EerResult eer(const ScoreSet& s);
/// Same rule over an explicit ascending threshold grid.
EerResult eer_on_grid(const ScoreSet& s, std::span<const double> taus);

/// failures / attempts; throws Error(parameter) for zero attempts or
/// failures > attempts.
double fte(std::uint64_t enroll_failures, std::uint64_t enroll_attempts);
double ftc(std::uint64_t capture_failures, std::uint64_t capture_attempts);

/// max_users * max_refs.
std::uint64_t template_capacity(const StoreLimits& limits);

/// Two-column "label distance" lines, label in {genuine, impostor}. Blank
/// lines and '#' comments are skipped.
ScoreSet read_scores(std::istream& in);
void write_scores(std::ostream& out, const ScoreSet& s);

}  // namespace saltbio
