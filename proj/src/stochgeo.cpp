// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/stochgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "prunegnn/rng.hpp"

namespace prunegnn::stochgeo {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr int kMaxSeriesIters = 500;
constexpr int kMaxNeighbourIters = 500;

// Solver results are compared against ratio targets with a little slack so
// that cells sitting exactly on the target (e.g. A_2 = 0.95 at alpha = 5)
// are not lost to the last rounding of a pow().
constexpr double kRatioSlack = 1e-12;

bool is_nonpositive_integer(double s) {
  return s <= 0.0 && s == std::floor(s);
}

// Series for the regularized lower gamma, x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double ap = s;
  for (int k = 0; k < kMaxSeriesIters; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) {
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw std::runtime_error("regularized_gamma_p: series did not converge");
}

// Modified Lentz continued fraction for the regularized upper gamma,
// x >= s + 1.
double gamma_q_cf(double s, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxSeriesIters; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) {
      return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw std::runtime_error("regularized_gamma_q: continued fraction did not converge");
}

// Unnormalized Gamma(s, x) for 0 < s, avoiding Gamma(s) overflow by staying
// regularized until the final scale.
double upper_gamma_positive(double s, double x) {
  if (x == 0.0) return std::tgamma(s);
  return std::exp(std::lgamma(s)) * regularized_gamma_q(s, x);
}

}  // namespace

void PppParams::validate() const {
  if (!(intensity > 0.0)) throw std::invalid_argument("PppParams: intensity must be > 0");
  if (!(path_loss_exponent > 2.0)) {
    throw std::invalid_argument("PppParams: path-loss exponent must be > 2 (expected interference diverges)");
  }
  if (!(reference_distance > 0.0)) {
    throw std::invalid_argument("PppParams: reference distance must be > 0");
  }
}

ThresholdSpec ThresholdSpec::Distance(double t, double ratio) {
  ThresholdSpec s;
  s.kind = ThresholdKind::kDistance;
  s.distance = t;
  s.target_ratio = ratio;
  return s;
}

ThresholdSpec ThresholdSpec::Neighbour(int n, double ratio) {
  ThresholdSpec s;
  s.kind = ThresholdKind::kNeighbour;
  s.neighbour_count = n;
  s.target_ratio = ratio;
  return s;
}

ThresholdSpec ThresholdSpec::Complete() { return ThresholdSpec{}; }

std::string ThresholdSpec::describe() const {
  switch (kind) {
    case ThresholdKind::kDistance: {
      std::string t = std::to_string(distance);
      t.erase(t.find_last_not_of('0') + 1);
      if (!t.empty() && t.back() == '.') t.pop_back();
      return "distance:" + t;
    }
    case ThresholdKind::kNeighbour:
      return "neighbour:" + std::to_string(neighbour_count);
    case ThresholdKind::kComplete:
      return "complete";
  }
  return "complete";
}

ThresholdSpec ThresholdSpec::parse(const std::string& text) {
  if (text == "complete") return Complete();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    try {
      if (head == "distance") return Distance(std::stod(tail));
      if (head == "neighbour" || head == "neighbor") return Neighbour(std::stoi(tail));
    } catch (const std::exception&) {
      // fall through to the error below
    }
  }
  throw std::invalid_argument("ThresholdSpec: cannot parse '" + text +
                              "' (expected distance:<t>, neighbour:<n> or complete)");
}

double expected_total_interference(const PppParams& p) {
  p.validate();
  const double d0 = p.reference_distance;
  return kPi * p.intensity * d0 * d0 * (1.0 + 2.0 / (p.path_loss_exponent - 2.0));
}

double distance_interference_ratio(const PppParams& p, double t) {
  p.validate();
  if (!(t >= p.reference_distance)) {
    throw std::invalid_argument("distance_interference_ratio: threshold must be >= reference distance");
  }
  const double a = p.path_loss_exponent;
  return (a - 2.0 * std::pow(t / p.reference_distance, 2.0 - a)) / a;
}

ThresholdSpec solve_distance_threshold(const PppParams& p, double target_ratio) {
  p.validate();
  const double a = p.path_loss_exponent;
  const double floor_ratio = (a - 2.0) / a;
  if (!(target_ratio > 0.0) || target_ratio >= 1.0) {
    throw std::invalid_argument("solve_distance_threshold: target ratio must lie in (0, 1)");
  }
  const double d0 = p.reference_distance;
  if (target_ratio <= floor_ratio + kRatioSlack) {
    // Already captured at the smallest admissible threshold.
    return ThresholdSpec::Distance(d0, distance_interference_ratio(p, d0));
  }
  // Invert A_t for a starting point, then settle the integer (in units of
  // d0) by direct evaluation; A_t is strictly increasing in t.
  const double t_star = std::pow(a * (1.0 - target_ratio) / 2.0, 1.0 / (2.0 - a));
  long multiple = std::max(1L, static_cast<long>(std::floor(t_star)) - 1);
  while (distance_interference_ratio(p, multiple * d0) < target_ratio - kRatioSlack) {
    ++multiple;
    if (multiple > 1000000L) {
      throw std::runtime_error("solve_distance_threshold: no integer threshold found");
    }
  }
  const double t = static_cast<double>(multiple) * d0;
  return ThresholdSpec::Distance(t, distance_interference_ratio(p, t));
}

double regularized_gamma_p(double s, double x) {
  if (!(s > 0.0)) throw std::invalid_argument("regularized_gamma_p: s must be > 0");
  if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_cf(s, x);
}

double regularized_gamma_q(double s, double x) {
  if (!(s > 0.0)) throw std::invalid_argument("regularized_gamma_q: s must be > 0");
  if (x < 0.0) throw std::invalid_argument("regularized_gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double exponential_integral_e1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("exponential_integral_e1: x must be > 0");
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k * k!)
    double sum = -kEulerGamma - std::log(x);
    double term = 1.0;
    for (int k = 1; k <= kMaxSeriesIters; ++k) {
      term *= -x / k;
      const double add = -term / k;
      sum += add;
      if (std::fabs(add) < std::fabs(sum) * 1e-17 + 1e-300) return sum;
    }
    throw std::runtime_error("exponential_integral_e1: series did not converge");
  }
  // Lentz continued fraction: E1(x) = e^-x / (x + 1/(1 + 1/(x + 2/(1 + ...))))
  const double tiny = 1e-290;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxSeriesIters; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) return h * std::exp(-x);
  }
  throw std::runtime_error("exponential_integral_e1: continued fraction did not converge");
}

double upper_incomplete_gamma(double s, double x) {
  if (x < 0.0) throw std::invalid_argument("upper_incomplete_gamma: x must be >= 0");
  if (s > 0.0) return upper_gamma_positive(s, x);
  if (!(x > 0.0)) {
    throw std::invalid_argument("upper_incomplete_gamma: x must be > 0 when s <= 0 (integral diverges at 0)");
  }
  if (s == 0.0) return exponential_integral_e1(x);

  // Descend from a tractable base with
  //   Gamma(s, x) = (Gamma(s+1, x) - x^s e^-x) / s.
  // Integer chains pass through Gamma(0, x) = E1(x); non-integer chains
  // start from the base with s0 in (0, 1].
  const double emx = std::exp(-x);
  if (is_nonpositive_integer(s)) {
    double g = exponential_integral_e1(x);
    for (double cur = -1.0; cur >= s - 0.5; cur -= 1.0) {
      g = (g - std::pow(x, cur) * emx) / cur;
    }
    return g;
  }
  const int steps = static_cast<int>(std::ceil(-s));
  const double s0 = s + steps;  // in (0, 1)
  double g = upper_gamma_positive(s0, x);
  for (int j = 1; j <= steps; ++j) {
    const double cur = s0 - j;
    g = (g - std::pow(x, cur) * emx) / cur;
  }
  return g;
}

double nth_neighbour_distance_pdf(const PppParams& p, int n, double r) {
  p.validate();
  if (n < 1) throw std::invalid_argument("nth_neighbour_distance_pdf: n must be >= 1");
  if (r < 0.0) throw std::invalid_argument("nth_neighbour_distance_pdf: r must be >= 0");
  if (r == 0.0) return 0.0;
  const double a = p.intensity * kPi * r * r;
  // e^-a * 2 a^n / (r (n-1)!), evaluated in log space for large n.
  const double log_pdf = -a + std::log(2.0) + n * std::log(a) - std::log(r) - std::lgamma(static_cast<double>(n));
  return std::exp(log_pdf);
}

double nth_neighbour_expected_interference(const PppParams& p, int n) {
  p.validate();
  if (n < 1) throw std::invalid_argument("nth_neighbour_expected_interference: n must be >= 1");
  const double alpha = p.path_loss_exponent;
  const double d0 = p.reference_distance;
  const double a = p.intensity * kPi * d0 * d0;

  // P(Rn <= d0): the n-th neighbour sits inside the saturated-gain disk.
  const double inside = regularized_gamma_p(static_cast<double>(n), a);

  const double s = n - alpha / 2.0;
  double tail;
  if (s > 0.0) {
    // d0^alpha (l*pi)^(alpha/2) / Gamma(n) * Gamma(s, a), with the gamma
    // ratio taken in log space so large n cannot overflow.
    const double log_scale = alpha * std::log(d0) + (alpha / 2.0) * std::log(p.intensity * kPi) +
                             std::lgamma(s) - std::lgamma(static_cast<double>(n));
    tail = std::exp(log_scale) * regularized_gamma_q(s, a);
  } else {
    // s <= 0 only happens for n <= alpha/2, so Gamma(n) is small.
    const double scale = std::pow(d0, alpha) * std::pow(p.intensity * kPi, alpha / 2.0) /
                         std::tgamma(static_cast<double>(n));
    tail = scale * upper_incomplete_gamma(s, a);
  }
  return inside + tail;
}

double neighbour_interference_ratio(const PppParams& p, int n) {
  p.validate();
  if (n < 1) throw std::invalid_argument("neighbour_interference_ratio: n must be >= 1");
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) sum += nth_neighbour_expected_interference(p, i);
  return sum / expected_total_interference(p);
}

ThresholdSpec solve_neighbour_threshold(const PppParams& p, double target_ratio) {
  p.validate();
  if (!(target_ratio > 0.0) || target_ratio >= 1.0) {
    throw std::invalid_argument("solve_neighbour_threshold: target ratio must lie in (0, 1)");
  }
  const double total = expected_total_interference(p);
  double sum = 0.0;
  for (int n = 1; n <= kMaxNeighbourIters; ++n) {
    sum += nth_neighbour_expected_interference(p, n);
    const double ratio = sum / total;
    if (ratio >= target_ratio - kRatioSlack) {
      return ThresholdSpec::Neighbour(n, ratio);
    }
  }
  throw std::runtime_error("solve_neighbour_threshold: iteration cap exceeded (numeric failure)");
}

InterferenceStats monte_carlo_interference_stats(const PppParams& p,
                                                 const ThresholdSpec& spec,
                                                 double region_side, int trials,
                                                 std::uint64_t seed) {
  p.validate();
  if (trials < 1) throw std::invalid_argument("monte_carlo_interference_stats: trials must be >= 1");
  if (!(region_side > 0.0)) {
    throw std::invalid_argument("monte_carlo_interference_stats: region side must be > 0");
  }
  const double alpha = p.path_loss_exponent;
  const double d0 = p.reference_distance;
  const double cx = region_side / 2.0;

  double mean = 0.0;
  double m2 = 0.0;
  std::vector<double> contributions;
  for (int trial = 0; trial < trials; ++trial) {
    rng::SplitMix64 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(trial)));
    const int count = gen.next_poisson(p.intensity * region_side * region_side);
    contributions.clear();
    contributions.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double x = gen.next_uniform(0.0, region_side);
      const double y = gen.next_uniform(0.0, region_side);
      const double r = std::hypot(x - cx, y - cx);
      const double gain = r <= d0 ? 1.0 : std::pow(r / d0, -alpha);
      switch (spec.kind) {
        case ThresholdKind::kComplete:
          contributions.push_back(gain);
          break;
        case ThresholdKind::kDistance:
          if (r <= spec.distance) contributions.push_back(gain);
          break;
        case ThresholdKind::kNeighbour:
          contributions.push_back(gain);
          break;
      }
    }
    double captured = 0.0;
    if (spec.kind == ThresholdKind::kNeighbour &&
        contributions.size() > static_cast<std::size_t>(spec.neighbour_count)) {
      // Keep the n largest gains == the n nearest points.
      std::nth_element(contributions.begin(), contributions.begin() + spec.neighbour_count,
                       contributions.end(), std::greater<double>());
      for (int i = 0; i < spec.neighbour_count; ++i) captured += contributions[static_cast<std::size_t>(i)];
    } else {
      for (const double g : contributions) captured += g;
    }
    // Welford update.
    const double delta = captured - mean;
    mean += delta / static_cast<double>(trial + 1);
    m2 += delta * (captured - mean);
  }
  InterferenceStats stats;
  stats.mean = mean;
  stats.variance = m2 / static_cast<double>(trials);
  stats.sample_count = trials;
  return stats;
}

}  // namespace prunegnn::stochgeo
