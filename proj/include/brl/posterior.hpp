#pragma once

#include "brl/noise.hpp"
#include "brl/numerics.hpp"
#include "brl/operators.hpp"
#include "brl/priors.hpp"

#include <Eigen/Cholesky>

#include <variant>
#include <vector>

namespace brl {

/// Exact posterior of a finitely supported prior.
struct CategoricalPosterior {
  std::vector<Vector> points;
  std::vector<double> log_weights;  // log-sum-exp is 0
};

/// Conjugate posterior of an isotropic Gaussian mixture prior. All
/// components share the precision I/tau^2 + (m/sigma^2) A^T A.
struct GaussianMixturePosterior {
  std::vector<Vector> component_means;
  Eigen::LLT<Matrix> precision_factor;
  std::vector<double> log_weights;

  Vector mean() const;
  /// Shared component covariance (inverse precision).
  Matrix component_covariance() const;
  /// Covariance of the whole mixture.
  Matrix covariance() const;
};

/// Self-normalized importance sampling with the prior as proposal.
/// Biased for finite particle counts; check the ESS before trusting it.
struct ParticlePosterior {
  std::vector<Vector> particles;
  std::vector<double> log_weights;
  double effective_sample_size = 0.0;
  bool degenerate = false;  // ESS < 2
};

using PosteriorModel = std::variant<CategoricalPosterior, GaussianMixturePosterior, ParticlePosterior>;

/// Shifts log-weights so they log-sum-exp to 0.
void normalize_log_weights(std::vector<double>& log_weights);

/// log w_i = log a_i - (m / (2 sigma^2)) ||y - A x_i||^2, normalized.
CategoricalPosterior posterior_dirac(const DiracMixture& prior, const DrawnOperator& a,
                                     const Vector& y, const NoiseSpec& noise);

/// Same, with the images A x_i already computed.
CategoricalPosterior posterior_dirac(const DiracMixture& prior, const std::vector<Vector>& images,
                                     const Vector& y, const NoiseSpec& noise);

GaussianMixturePosterior posterior_gaussian_mixture(const GaussianMixture& prior,
                                                    const DrawnOperator& a, const Vector& y,
                                                    const NoiseSpec& noise);

ParticlePosterior posterior_particles(const PriorSpec& prior, const DrawnOperator& a,
                                      const Vector& y, const NoiseSpec& noise, int n_particles,
                                      RandomStream& stream);

Vector sample_posterior(const PosteriorModel& model, RandomStream& stream);

/// Normalized weights exp(log_weights).
std::vector<double> posterior_weights(const std::vector<double>& log_weights);

}  // namespace brl
