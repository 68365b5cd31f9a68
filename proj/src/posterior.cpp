#include "brl/posterior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace brl {

void normalize_log_weights(std::vector<double>& log_weights) {
  const double lse = log_sum_exp(log_weights);
  if (!std::isfinite(lse)) throw Error("posterior: every weight vanished");
  for (auto& lw : log_weights) lw -= lse;
}

std::vector<double> posterior_weights(const std::vector<double>& log_weights) {
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i]);
  return w;
}

CategoricalPosterior posterior_dirac(const DiracMixture& prior, const std::vector<Vector>& images,
                                     const Vector& y, const NoiseSpec& noise) {
  if (images.size() != prior.points.size()) throw Error("posterior_dirac: one image per atom is required");
  const double precision = 1.0 / (2.0 * noise.variance());
  CategoricalPosterior post;
  post.points = prior.points;
  post.log_weights.resize(prior.points.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].size() != y.size()) throw Error("posterior_dirac: measurement dimension mismatch");
    post.log_weights[i] = prior.weights[i] > 0.0
                              ? std::log(prior.weights[i]) - precision * (y - images[i]).squaredNorm()
                              : -std::numeric_limits<double>::infinity();
  }
  normalize_log_weights(post.log_weights);
  return post;
}

CategoricalPosterior posterior_dirac(const DiracMixture& prior, const DrawnOperator& a,
                                     const Vector& y, const NoiseSpec& noise) {
  if (y.size() != a.q()) throw Error("posterior_dirac: y must have one entry per operator row");
  std::vector<Vector> images;
  images.reserve(prior.points.size());
  for (const auto& x : prior.points) images.push_back(a.apply(x));
  return posterior_dirac(prior, images, y, noise);
}

GaussianMixturePosterior posterior_gaussian_mixture(const GaussianMixture& prior,
                                                    const DrawnOperator& a, const Vector& y,
                                                    const NoiseSpec& noise) {
  if (y.size() != a.q()) throw Error("posterior_gaussian_mixture: y must have one entry per operator row");
  if (!(prior.tau > 0.0)) throw Error("posterior_gaussian_mixture: tau must be positive");
  const Matrix am = a.to_dense();
  const auto n = am.cols();
  const auto q = am.rows();
  const double tau2 = prior.tau * prior.tau;
  const double lik_precision = 1.0 / noise.variance();  // m / sigma^2

  Matrix precision = Matrix::Identity(n, n) / tau2 + lik_precision * am.transpose() * am;
  GaussianMixturePosterior post;
  post.precision_factor.compute(precision);
  if (post.precision_factor.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "posterior_gaussian_mixture: posterior precision is not positive definite (rcond "
        << post.precision_factor.rcond() << ")";
    throw Error(msg.str());
  }

  // Marginal of y under component i: N(A mu_i, (sigma^2/m) I + tau^2 A A^T).
  Matrix marginal = noise.variance() * Matrix::Identity(q, q) + tau2 * am * am.transpose();
  Eigen::LLT<Matrix> marginal_factor(marginal);
  if (marginal_factor.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "posterior_gaussian_mixture: marginal covariance is not positive definite (rcond "
        << marginal_factor.rcond() << ")";
    throw Error(msg.str());
  }
  const Matrix lm = marginal_factor.matrixL();
  const double log_det = 2.0 * lm.diagonal().array().log().sum();
  const double log_norm = -0.5 * (static_cast<double>(q) * std::log(2.0 * std::numbers::pi) + log_det);

  const Vector aty = lik_precision * am.transpose() * y;
  for (std::size_t i = 0; i < prior.means.size(); ++i) {
    const Vector& mu = prior.means[i];
    post.component_means.push_back(post.precision_factor.solve(mu / tau2 + aty));
    const Vector r = marginal_factor.matrixL().solve(y - am * mu);
    post.log_weights.push_back(prior.weights[i] > 0.0
                                   ? std::log(prior.weights[i]) + log_norm - 0.5 * r.squaredNorm()
                                   : -std::numeric_limits<double>::infinity());
  }
  normalize_log_weights(post.log_weights);
  return post;
}

Vector GaussianMixturePosterior::mean() const {
  Vector out = Vector::Zero(component_means.front().size());
  for (std::size_t i = 0; i < component_means.size(); ++i)
    out += std::exp(log_weights[i]) * component_means[i];
  return out;
}

Matrix GaussianMixturePosterior::component_covariance() const {
  const auto n = component_means.front().size();
  return precision_factor.solve(Matrix::Identity(n, n));
}

Matrix GaussianMixturePosterior::covariance() const {
  const Vector mu = mean();
  Matrix out = component_covariance();
  for (std::size_t i = 0; i < component_means.size(); ++i) {
    const Vector d = component_means[i] - mu;
    out += std::exp(log_weights[i]) * d * d.transpose();
  }
  return out;
}

ParticlePosterior posterior_particles(const PriorSpec& prior, const DrawnOperator& a,
                                      const Vector& y, const NoiseSpec& noise, int n_particles,
                                      RandomStream& stream) {
  if (n_particles < 2) throw Error("posterior_particles: at least two particles are required");
  if (y.size() != a.q()) throw Error("posterior_particles: y must have one entry per operator row");
  const double precision = 1.0 / (2.0 * noise.variance());
  ParticlePosterior post;
  post.particles.reserve(static_cast<std::size_t>(n_particles));
  post.log_weights.reserve(static_cast<std::size_t>(n_particles));
  for (int j = 0; j < n_particles; ++j) {
    Vector x = sample_prior(prior, stream);
    post.log_weights.push_back(-precision * (y - a.apply(x)).squaredNorm());
    post.particles.push_back(std::move(x));
  }
  normalize_log_weights(post.log_weights);
  double sum_sq = 0.0;
  for (const double lw : post.log_weights) sum_sq += std::exp(2.0 * lw);
  post.effective_sample_size = 1.0 / sum_sq;
  post.degenerate = post.effective_sample_size < 2.0;
  return post;
}

namespace {

std::size_t draw_from_log_weights(const std::vector<double>& log_weights, RandomStream& stream) {
  return sample_index(posterior_weights(log_weights), stream);
}

}  // namespace

Vector sample_posterior(const PosteriorModel& model, RandomStream& stream) {
  return std::visit(
      [&stream](const auto& post) -> Vector {
        using T = std::decay_t<decltype(post)>;
        if constexpr (std::is_same_v<T, CategoricalPosterior>) {
          return post.points[draw_from_log_weights(post.log_weights, stream)];
        } else if constexpr (std::is_same_v<T, GaussianMixturePosterior>) {
          const auto i = draw_from_log_weights(post.log_weights, stream);
          const Vector z = draw_gaussian(stream, post.component_means[i].size());
          // Precision = L L^T, so L^{-T} z has covariance precision^{-1}.
          return post.component_means[i] + post.precision_factor.matrixU().solve(z);
        } else {
          return post.particles[draw_from_log_weights(post.log_weights, stream)];
        }
      },
      model);
}

}  // namespace brl
