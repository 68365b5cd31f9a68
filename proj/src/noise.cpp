#include "brl/noise.hpp"

#include <cmath>
#include <numbers>

namespace brl {

void validate_noise(const NoiseSpec& spec) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) throw Error("noise: sigma must be positive");
  if (spec.m_nominal < 1) throw Error("noise: m must be positive");
}

Vector draw_noise(const NoiseSpec& spec, int q, RandomStream& stream) {
  if (q < 1) throw Error("draw_noise: dimension must be positive");
  return std::sqrt(spec.variance()) * draw_gaussian(stream, q);
}

double d_upp(const NoiseSpec& spec, double t) {
  const double z = (t * t) / (spec.sigma * spec.sigma);
  if (!(z > 1.0)) return 1.0;
  return std::exp(0.5 * spec.m_nominal * (std::log(z) + 1.0 - z));
}

double d_shift(const NoiseSpec& spec, double eps, double tau) {
  if (eps < 0.0 || tau < 0.0) throw Error("d_shift: eps and tau must be nonnegative");
  return std::exp(spec.m_nominal * (2.0 * tau + eps) * eps / (2.0 * spec.sigma * spec.sigma));
}

double log_density(const NoiseSpec& spec, const Vector& e) {
  const double var = spec.variance();
  return -0.5 * static_cast<double>(e.size()) * std::log(2.0 * std::numbers::pi * var) -
         e.squaredNorm() / (2.0 * var);
}

}  // namespace brl
