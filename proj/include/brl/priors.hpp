#pragma once

#include "brl/numerics.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace brl {

/// Finitely supported prior: point i has probability weights[i].
struct DiracMixture {
  std::vector<Vector> points;
  std::vector<double> weights;
};

/// Isotropic Gaussian mixture: component i is N(means[i], tau^2 I).
struct GaussianMixture {
  std::vector<Vector> means;
  double tau = 1.0;
  std::vector<double> weights;
};

/// s-sparse vectors: uniformly random support of size s, N(0,1) entries on it.
struct SparseGaussian {
  int n = 1;
  int s = 1;
};

/// Pushforward of N(0, I_k) through a tanh network.
///
/// Layer l maps widths[l-1] -> widths[l] (widths[-1] is the latent dimension)
/// by a dense matrix; tanh is applied after every layer except the last.
/// Weights are i.i.d. N(0, 1/fan_in) drawn from `weight_seed`, unless set
/// explicitly with `with_layers`.
struct GenerativePushforward {
  int latent_dim = 1;
  std::vector<int> widths;
  std::uint64_t weight_seed = 0;
  std::vector<Matrix> layers;

  static GenerativePushforward from_seed(int latent_dim, std::vector<int> widths,
                                         std::uint64_t weight_seed);
  static GenerativePushforward with_layers(std::vector<Matrix> layers);

  int output_dim() const { return widths.empty() ? latent_dim : widths.back(); }
  Vector evaluate(const Vector& z) const;
};

/// A Dirac mixture whose i-th atom is moved by offsets[i], with every offset
/// norm at most eps. Paired with its base it realizes a W_inf coupling.
struct PerturbedPrior {
  DiracMixture base;
  std::vector<Vector> offsets;
  double eps = 0.0;

  DiracMixture perturbed() const;
};

using PriorSpec =
    std::variant<DiracMixture, GaussianMixture, SparseGaussian, GenerativePushforward,
                 PerturbedPrior>;

/// Throws brl::Error if an invariant of the spec is violated (weights,
/// dimensions, sparsity, offset norms).
void validate_prior(const PriorSpec& spec);

/// Ambient dimension n of the prior.
int prior_dimension(const PriorSpec& spec);

Vector sample_prior(const PriorSpec& spec, RandomStream& stream);

/// Index of a categorical draw from (normalized) weights.
std::size_t sample_index(const std::vector<double>& weights, RandomStream& stream);

/// Uniformly random size-s subset of {0..n-1}, sorted.
std::vector<int> sample_support(int n, int s, RandomStream& stream);

double min_separation(const DiracMixture& spec);

/// Product of per-layer spectral norms (tanh is 1-Lipschitz).
double lipschitz_bound(const GenerativePushforward& spec);

/// max_i ||offset_i||: an upper bound on W_inf(base, perturbed).
double wasserstein_infty_certificate(const PerturbedPrior& spec);

/// Support points when the prior is finitely supported (Dirac or perturbed),
/// otherwise nullptr.
const DiracMixture* as_dirac(const PriorSpec& spec, DiracMixture& storage);

}  // namespace brl
