#pragma once

#include "brl/numerics.hpp"
#include "brl/operators.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace brl {

/// low: P(||Ax|| <= t ||x||); upp: P(||Ax|| >= t ||x||).
enum class Side { low, upp };
enum class EstimateKind { exact, analytic_bound, monte_carlo };

std::string_view to_string(Side side);
std::string_view to_string(EstimateKind kind);

struct ConcentrationEstimate {
  double t = 0.0;
  double value = 1.0;
  EstimateKind kind = EstimateKind::exact;
  int n_x = 0;
  int n_A = 0;
  double std_err = 0.0;  // Monte Carlo only
  bool vacuous = false;  // t outside the range where the bound says anything
};

/// Exact constants for Gaussian operators: m ||Ax||^2 / ||x||^2 ~ chi^2_m for
/// every x != 0, so the value is uniform over any direction set.
ConcentrationEstimate gaussian_exact_conc(double t, int m, Side side);

/// Bernstein bound 2 exp(-(m s^2 / 2) / (mu (1 + s/3))) for subsampled
/// orthogonal operators, with s = t^2 - 1 (upp, t > 1) or s = 1 - t^2
/// (low, t < 1). Returns 1 flagged vacuous at or beyond t = 1.
ConcentrationEstimate bernstein_orthog_bound(double t, int m, double mu, Side side);

using DirectionSampler = std::function<Vector(RandomStream&)>;

/// Monte Carlo estimate of the concentration constant over sampled
/// directions: the maximum over n_x directions of the empirical event
/// frequency over n_A operator draws. This is a lower estimate of the sup
/// over the whole direction set. Each (direction, draw) cell has its own
/// stream, so the result does not depend on the thread count.
ConcentrationEstimate estimate_conc_mc(const OperatorSpec& spec, int m, int n,
                                       const DirectionSampler& directions, double t, Side side,
                                       int n_x, int n_A, RandomStream stream,
                                       Exec exec = Exec::parallel);

/// Same estimator over an explicit direction list (zero vectors skipped).
ConcentrationEstimate estimate_conc_mc(const OperatorSpec& spec, int m,
                                       const std::vector<Vector>& directions, double t,
                                       Side side, int n_A, RandomStream stream,
                                       Exec exec = Exec::parallel);

/// Absolute concentration bound P(||Ax|| > t) over ||x|| <= s_radius.
/// Exactly 0 when s_radius = 0, or for subsampled operators once
/// t >= s_radius sqrt(n/m); otherwise a Monte Carlo estimate with the
/// sampled directions rescaled to norm s_radius.
ConcentrationEstimate c_abs_bound(const OperatorSpec& spec, int m, int n, double s_radius,
                                  double t_threshold, const DirectionSampler& directions,
                                  int n_x, int n_A, RandomStream stream,
                                  Exec exec = Exec::parallel);

/// Binomial standard error sqrt(p (1 - p) / trials).
double binomial_std_err(double p, long long trials);

}  // namespace brl
