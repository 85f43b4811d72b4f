#include "saltbio/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "saltbio/error.hpp"

namespace saltbio {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(Errc::domain, "threshold must be in [0, 1]");
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Error counts at one threshold on pre-sorted lists.
struct Counts {
  std::size_t false_accepts;
  std::size_t false_rejects;
};

Counts counts_at(const std::vector<double>& genuine, const std::vector<double>& impostor, double tau) {
  const auto fa = static_cast<std::size_t>(std::upper_bound(impostor.begin(), impostor.end(), tau) - impostor.begin());
  const auto accepted = static_cast<std::size_t>(std::upper_bound(genuine.begin(), genuine.end(), tau) - genuine.begin());
  return {fa, genuine.size() - accepted};
}

EerResult closest_point(const ScoreSet& s, const std::vector<double>& candidates) {
  if (s.genuine.empty() || s.impostor.empty()) throw Error(Errc::domain, "EER needs genuine and impostor scores");
  s.check_range();
  const auto g = sorted(s.genuine);
  const auto im = sorted(s.impostor);
  const auto ng = static_cast<std::uint64_t>(g.size());
  const auto ni = static_cast<std::uint64_t>(im.size());

  // |fa/ni - fr/ng| compared exactly as |fa*ng - fr*ni| over the common denominator.
  std::uint64_t best_gap = UINT64_MAX;
  EerResult best;
  for (double tau : candidates) {
    const Counts c = counts_at(g, im, tau);
    const std::uint64_t a = c.false_accepts * ng;
    const std::uint64_t b = c.false_rejects * ni;
    const std::uint64_t gap = a > b ? a - b : b - a;
    if (gap < best_gap) {
      best_gap = gap;
      best.tau = tau;
      best.far = static_cast<double>(c.false_accepts) / static_cast<double>(ni);
      best.frr = static_cast<double>(c.false_rejects) / static_cast<double>(ng);
    }
  }
  best.eer = (best.far + best.frr) / 2.0;
  return best;
}

}  // namespace

void ScoreSet::check_range() const {
  for (const auto* list : {&genuine, &impostor}) {
    for (double d : *list) {
      if (!(d >= 0.0 && d <= 1.0)) throw Error(Errc::domain, "score outside [0, 1]");
    }
  }
}

double far(const ScoreSet& s, double tau) {
  check_tau(tau);
  if (s.impostor.empty()) throw Error(Errc::domain, "FAR needs impostor scores");
  const auto n = std::count_if(s.impostor.begin(), s.impostor.end(), [tau](double d) { return d <= tau; });
  return static_cast<double>(n) / static_cast<double>(s.impostor.size());
}

double frr(const ScoreSet& s, double tau) {
  check_tau(tau);
  if (s.genuine.empty()) throw Error(Errc::domain, "FRR needs genuine scores");
  const auto n = std::count_if(s.genuine.begin(), s.genuine.end(), [tau](double d) { return d > tau; });
  return static_cast<double>(n) / static_cast<double>(s.genuine.size());
}

double probit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::domain, "probit argument must be in (0, 1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

std::vector<RatePoint> roc_points(const ScoreSet& s, std::span<const double> taus) {
  if (!std::is_sorted(taus.begin(), taus.end())) throw Error(Errc::domain, "threshold grid must be ascending");
  std::vector<RatePoint> out;
  out.reserve(taus.size());
  for (double t : taus) out.push_back({t, far(s, t), frr(s, t)});
  return out;
}

std::vector<DetPoint> det_points(const ScoreSet& s, std::span<const double> taus) {
  auto clamp = [](double r) { return std::clamp(r, kDetClamp, 1.0 - kDetClamp); };
  std::vector<DetPoint> out;
  for (const auto& p : roc_points(s, taus)) {
    out.push_back({p.tau, p.far, p.frr, probit(clamp(p.far)), probit(clamp(p.frr))});
  }
  return out;
}

std::vector<double> uniform_grid(std::size_t steps) {
  if (steps == 0) throw Error(Errc::parameter, "grid needs at least one step");
  std::vector<double> out(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out[i] = static_cast<double>(i) / static_cast<double>(steps);
  return out;
}

EerResult eer(const ScoreSet& s) {
  std::vector<double> candidates{0.0, 1.0};
  candidates.insert(candidates.end(), s.genuine.begin(), s.genuine.end());
  candidates.insert(candidates.end(), s.impostor.begin(), s.impostor.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return closest_point(s, candidates);
}

EerResult eer_on_grid(const ScoreSet& s, std::span<const double> taus) {
  if (taus.empty() || !std::is_sorted(taus.begin(), taus.end())) {
    throw Error(Errc::domain, "threshold grid must be non-empty and ascending");
  }
  return closest_point(s, std::vector<double>(taus.begin(), taus.end()));
}

namespace {

double failure_ratio(std::uint64_t failures, std::uint64_t attempts) {
  if (attempts == 0) throw Error(Errc::parameter, "attempt count must be positive");
  if (failures > attempts) throw Error(Errc::parameter, "failures exceed attempts");
  return static_cast<double>(failures) / static_cast<double>(attempts);
}

}  // namespace

double fte(std::uint64_t enroll_failures, std::uint64_t enroll_attempts) {
  return failure_ratio(enroll_failures, enroll_attempts);
}

double ftc(std::uint64_t capture_failures, std::uint64_t capture_attempts) {
  return failure_ratio(capture_failures, capture_attempts);
}

std::uint64_t template_capacity(const StoreLimits& limits) {
  return static_cast<std::uint64_t>(limits.max_users) * static_cast<std::uint64_t>(limits.max_refs);
}

ScoreSet read_scores(std::istream& in) {
  ScoreSet s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string label;
    double d = 0.0;
    std::string extra;
    if (!(ls >> label >> d) || (ls >> extra)) {
      throw Error(Errc::format, "score line " + std::to_string(lineno) + ": expected '<label> <distance>'");
    }
    if (!(d >= 0.0 && d <= 1.0)) throw Error(Errc::domain, "score line " + std::to_string(lineno) + ": out of [0, 1]");
    if (label == "genuine") {
      s.genuine.push_back(d);
    } else if (label == "impostor") {
      s.impostor.push_back(d);
    } else {
      throw Error(Errc::format, "score line " + std::to_string(lineno) + ": unknown label " + label);
    }
  }
  return s;
}

void write_scores(std::ostream& out, const ScoreSet& s) {
  out.precision(17);
  for (double d : s.genuine) out << "genuine " << d << '\n';
  for (double d : s.impostor) out << "impostor " << d << '\n';
}

}  // namespace saltbio
