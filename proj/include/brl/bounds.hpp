#pragma once

#include "brl/noise.hpp"

#include <limits>

namespace brl {

struct BoundInputs {
  double delta = 0.05;
  double eps = 0.0;  // W_p budget between the real and model priors
  double p_order = std::numeric_limits<double>::infinity();
  double eta = 0.0;
  double sigma = 1.0;
  double c = 32.0;
  double c_prime = 2.0;
  double t = 2.0;
  double k = 0.0;  // log-cover budget
  int m = 1;
};

struct BoundBreakdown {
  double term_2delta = 0.0;
  double term_c_abs = 0.0;
  double term_d_upp_cprime = 0.0;
  double term_shift_factor = 1.0;
  double term_exp_k = 1.0;
  double term_c_low = 0.0;
  double term_c_upp = 0.0;
  double term_d_upp_inner = 0.0;
  double total = 0.0;          // raw sum, may exceed 1
  double total_clamped = 0.0;  // min(total, 1)
  double threshold = 0.0;      // (c + 2)(eta + sigma)
};

/// Throws if delta is outside [0, 1/4], p_order < 1, sigma below the scaled
/// budget eps / delta^{1/p}, or any scalar is out of range.
void validate_bound_inputs(const BoundInputs& in);

/// eps / delta^{1/p}, with delta^{1/inf} = 1 and 0 whenever eps = 0.
double scaled_eps(const BoundInputs& in);

/// Assembles the failure-probability bound at error level (c + 2)(eta + sigma):
///   2 delta + c_abs + d_upp_outer
///     + 2 d_shift e^k (c_low + c_upp + 2 d_upp_inner).
BoundBreakdown theorem_main_bound(const BoundInputs& in, double c_abs, double d_upp_outer,
                                  double d_shift, double c_low, double c_upp,
                                  double d_upp_inner);

/// The same bound with every constant evaluated exactly for a Gaussian
/// operator: chi-square concentration at 2 sqrt(2)/sqrt(c) and sqrt(c)/(2 sqrt(2)),
/// C_abs(s, t s) = P(chi^2_m > m t^2) for s > 0, and the Gaussian noise tails.
BoundBreakdown theorem_main_gaussian(const BoundInputs& in);

/// Arguments at which the concentration constants enter the main bound.
double main_low_arg(double c);
double main_upp_arg(double c);

/// delta + cov_count (c_low + c_upp + e^{-m/16}). The printed inequality hides a
/// universal constant, so this is a diagnostic expression, not a certified
/// probability bound. Error level: (8 d^2 + 2)(eta + sigma).
double theorem_simplified_expression(double d, double eta, double sigma, double delta,
                                     double cov_count, double c_low, double c_upp, int m);
double simplified_threshold(double d, double eta, double sigma);

/// ceil(c_const (k_cov_log + log(1/delta))).
long long m_condition_subgauss(double k_cov_log, double delta, double c_const);
/// ceil(c_const mu (cov_log + log(1/delta))).
long long m_condition_orthog(double cov_log, double delta, double mu, double c_const);

/// TV between N(a, s^2 I) and N(b, s^2 I) with ||a - b|| / s = delta_param:
/// 2 Phi(delta_param / 2) - 1.
double tv_gaussian_shift(double delta_param);

/// max(0, 1 - (c_low + c_upp + 2 d_upp_inner)).
double tv_separation_lower_bound(double c, double c_low, double c_upp, double d_upp_inner);

}  // namespace brl
