// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form interference statistics of a stationary planar Poisson field
// under unit transmit power and the bounded path-loss law
// g(r) = min{1, (r/d0)^-alpha}, plus the solvers that turn a target
// captured-interference ratio into a distance- or neighbour-based pruning
// threshold, and a Monte-Carlo probe that measures what a threshold
// actually captures.

#ifndef PRUNEGNN_STOCHGEO_HPP
#define PRUNEGNN_STOCHGEO_HPP

#include <cstdint>
#include <string>

namespace prunegnn::stochgeo {

struct PppParams {
  double intensity = 0.0;             // lambda, pairs per square meter
  double path_loss_exponent = 0.0;    // alpha, > 2 for finite mean
  double reference_distance = 1.0;    // d0, meters

  void validate() const;
};

enum class ThresholdKind { kDistance, kNeighbour, kComplete };

struct ThresholdSpec {
  ThresholdKind kind = ThresholdKind::kComplete;
  double distance = 0.0;     // meters; Distance only, >= d0
  int neighbour_count = 0;   // Neighbour only, >= 1
  double target_ratio = 0.0; // captured-interference ratio this achieves (0 if unknown)

  static ThresholdSpec Distance(double t, double ratio = 0.0);
  static ThresholdSpec Neighbour(int n, double ratio = 0.0);
  static ThresholdSpec Complete();

  // "distance:6", "neighbour:2", "complete"; parse() inverts it.
  std::string describe() const;
  static ThresholdSpec parse(const std::string& text);
};

struct InterferenceStats {
  double mean = 0.0;
  double variance = 0.0;   // population variance over trials
  long sample_count = 0;
};

// E[I] = pi*lambda*d0^2*(1 + 2/(alpha-2))   (Campbell's theorem)
double expected_total_interference(const PppParams& p);

// A_t = (alpha - 2*(t/d0)^(2-alpha)) / alpha, for t >= d0.
double distance_interference_ratio(const PppParams& p, double t);

// Smallest integer multiple of d0 whose ratio A_t reaches target_ratio.
ThresholdSpec solve_distance_threshold(const PppParams& p, double target_ratio);

// Gamma(s, x) = integral_x^inf t^(s-1) e^(-t) dt for real s, including the
// negative and zero s needed by the neighbour formulas. x > 0 when s <= 0.
double upper_incomplete_gamma(double s, double x);

// Regularized P(s,x) = gamma(s,x)/Gamma(s) and Q(s,x) = 1 - P(s,x), s > 0.
double regularized_gamma_p(double s, double x);
double regularized_gamma_q(double s, double x);

// E_1(x) = Gamma(0, x), x > 0.
double exponential_integral_e1(double x);

// Distance to the n-th nearest point: f_Rn(r) = e^(-l*pi*r^2) * 2*(l*pi*r^2)^n / (r*(n-1)!)
double nth_neighbour_distance_pdf(const PppParams& p, int n, double r);

// E[I_n(n)]: expected interference contributed by the n-th nearest point alone.
double nth_neighbour_expected_interference(const PppParams& p, int n);

// O_n = sum_{i<=n} E[I_n(i)] / E[I]; increasing in n, -> 1.
double neighbour_interference_ratio(const PppParams& p, int n);

// Smallest n with O_n >= target_ratio.
ThresholdSpec solve_neighbour_threshold(const PppParams& p, double target_ratio);

// Scatters Poisson(lambda*side^2) points uniformly on a side x side square
// and measures the interference a probe at the centre would attribute to
// the points kept by the pruning rule. Deterministic given seed; trials are
// independently seeded so fan-out and serial execution agree.
InterferenceStats monte_carlo_interference_stats(const PppParams& p,
                                                 const ThresholdSpec& spec,
                                                 double region_side, int trials,
                                                 std::uint64_t seed);

}  // namespace prunegnn::stochgeo

#endif  // PRUNEGNN_STOCHGEO_HPP
