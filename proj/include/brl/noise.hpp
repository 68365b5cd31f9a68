#pragma once

#include "brl/numerics.hpp"

namespace brl {

/// Gaussian noise N(0, (sigma^2 / m) I). The realized dimension may differ
/// from m (subsampled operators); formulas keep the nominal m.
struct NoiseSpec {
  double sigma = 1.0;
  int m_nominal = 1;

  double variance() const { return sigma * sigma / m_nominal; }
};

void validate_noise(const NoiseSpec& spec);

/// q i.i.d. N(0, sigma^2 / m) entries.
Vector draw_noise(const NoiseSpec& spec, int q, RandomStream& stream);

/// Chernoff tail bound on P(||e|| >= t): (t^2/sigma^2 * e^{1 - t^2/sigma^2})^{m/2}
/// for t > sigma; 1 for t <= sigma.
double d_upp(const NoiseSpec& spec, double t);

/// Density shift bound exp(m (2 tau + eps) eps / (2 sigma^2)).
double d_shift(const NoiseSpec& spec, double eps, double tau);

/// Exact log-density; the dimension is e.size().
double log_density(const NoiseSpec& spec, const Vector& e);

}  // namespace brl
