#include "brl/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace brl {

namespace {

void check_weights(const std::vector<double>& weights, std::size_t expected) {
  if (weights.size() != expected)
    throw Error("prior: expected " + std::to_string(expected) + " weights, got " +
                std::to_string(weights.size()));
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("prior: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error("prior: weights sum to 1 + " + std::to_string(total - 1.0));
}

void check_same_dimension(const std::vector<Vector>& points) {
  if (points.empty()) throw Error("prior: at least one point is required");
  const auto n = points.front().size();
  if (n < 1) throw Error("prior: points must have positive dimension");
  for (const auto& p : points) {
    if (p.size() != n) throw Error("prior: all points must share one dimension");
    if (!p.allFinite()) throw Error("prior: points must be finite");
  }
}

}  // namespace

GenerativePushforward GenerativePushforward::from_seed(int latent_dim, std::vector<int> widths,
                                                       std::uint64_t weight_seed) {
  if (latent_dim < 1) throw Error("generative prior: latent dimension must be positive");
  if (widths.empty()) throw Error("generative prior: at least one layer is required");
  GenerativePushforward g;
  g.latent_dim = latent_dim;
  g.widths = std::move(widths);
  g.weight_seed = weight_seed;
  int fan_in = latent_dim;
  for (std::size_t l = 0; l < g.widths.size(); ++l) {
    const int fan_out = g.widths[l];
    if (fan_out < 1) throw Error("generative prior: layer widths must be positive");
    RandomStream stream = derive_stream(weight_seed, {l});
    Matrix w(fan_out, fan_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * stream.next_normal();
    g.layers.push_back(std::move(w));
    fan_in = fan_out;
  }
  return g;
}

GenerativePushforward GenerativePushforward::with_layers(std::vector<Matrix> layers) {
  if (layers.empty()) throw Error("generative prior: at least one layer is required");
  GenerativePushforward g;
  g.latent_dim = static_cast<int>(layers.front().cols());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (l > 0 && layers[l].cols() != layers[l - 1].rows())
      throw Error("generative prior: layer shapes do not chain");
    g.widths.push_back(static_cast<int>(layers[l].rows()));
  }
  g.layers = std::move(layers);
  return g;
}

Vector GenerativePushforward::evaluate(const Vector& z) const {
  if (z.size() != latent_dim) throw Error("generative prior: latent dimension mismatch");
  Vector h = z;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    h = layers[l] * h;
    if (l + 1 < layers.size()) h = h.array().tanh().matrix();
  }
  return h;
}

DiracMixture PerturbedPrior::perturbed() const {
  DiracMixture out = base;
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i] += offsets[i];
  return out;
}

void validate_prior(const PriorSpec& spec) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiracMixture>) {
          check_same_dimension(p.points);
          check_weights(p.weights, p.points.size());
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          check_same_dimension(p.means);
          check_weights(p.weights, p.means.size());
          if (!(p.tau > 0.0)) throw Error("gaussian mixture: tau must be positive");
        } else if constexpr (std::is_same_v<T, SparseGaussian>) {
          if (p.n < 1 || p.s < 1 || p.s > p.n) throw Error("sparse prior: need 1 <= s <= n");
        } else if constexpr (std::is_same_v<T, GenerativePushforward>) {
          if (p.layers.size() != p.widths.size() || p.layers.empty())
            throw Error("generative prior: weights not materialized");
        } else {
          check_same_dimension(p.base.points);
          check_weights(p.base.weights, p.base.points.size());
          if (!(p.eps >= 0.0)) throw Error("perturbed prior: eps must be nonnegative");
          if (p.offsets.size() != p.base.points.size())
            throw Error("perturbed prior: one offset per base point is required");
          for (const auto& o : p.offsets) {
            if (o.size() != p.base.points.front().size())
              throw Error("perturbed prior: offset dimension mismatch");
            if (o.norm() > p.eps)
              throw Error("perturbed prior: offset norm " + std::to_string(o.norm()) +
                          " exceeds eps " + std::to_string(p.eps));
          }
        }
      },
      spec);
}

int prior_dimension(const PriorSpec& spec) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiracMixture>) {
          return static_cast<int>(p.points.front().size());
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return static_cast<int>(p.means.front().size());
        } else if constexpr (std::is_same_v<T, SparseGaussian>) {
          return p.n;
        } else if constexpr (std::is_same_v<T, GenerativePushforward>) {
          return p.output_dim();
        } else {
          return static_cast<int>(p.base.points.front().size());
        }
      },
      spec);
}

std::size_t sample_index(const std::vector<double>& weights, RandomStream& stream) {
  const double u = stream.next_uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding left a sliver above the cumulative sum.
  return last_positive;
}

std::vector<int> sample_support(int n, int s, RandomStream& stream) {
  // Partial Fisher-Yates over an index table.
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = i + static_cast<int>(stream.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector sample_prior(const PriorSpec& spec, RandomStream& stream) {
  return std::visit(
      [&stream](const auto& p) -> Vector {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiracMixture>) {
          return p.points[sample_index(p.weights, stream)];
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          const auto i = sample_index(p.weights, stream);
          return p.means[i] + p.tau * draw_gaussian(stream, p.means[i].size());
        } else if constexpr (std::is_same_v<T, SparseGaussian>) {
          Vector x = Vector::Zero(p.n);
          for (const int i : sample_support(p.n, p.s, stream)) x[i] = stream.next_normal();
          return x;
        } else if constexpr (std::is_same_v<T, GenerativePushforward>) {
          return p.evaluate(draw_gaussian(stream, p.latent_dim));
        } else {
          const auto i = sample_index(p.base.weights, stream);
          return p.base.points[i] + p.offsets[i];
        }
      },
      spec);
}

double min_separation(const DiracMixture& spec) {
  if (spec.points.size() < 2) throw Error("min_separation: at least two points are required");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.points.size(); ++i)
    for (std::size_t j = i + 1; j < spec.points.size(); ++j)
      best = std::min(best, (spec.points[i] - spec.points[j]).norm());
  return best;
}

double lipschitz_bound(const GenerativePushforward& spec) {
  double l = 1.0;
  for (const auto& w : spec.layers) l *= spectral_norm(w, 1e-6, 10000);
  return l;
}

double wasserstein_infty_certificate(const PerturbedPrior& spec) {
  double eps = 0.0;
  for (const auto& o : spec.offsets) eps = std::max(eps, o.norm());
  return eps;
}

const DiracMixture* as_dirac(const PriorSpec& spec, DiracMixture& storage) {
  if (const auto* d = std::get_if<DiracMixture>(&spec)) return d;
  if (const auto* p = std::get_if<PerturbedPrior>(&spec)) {
    storage = p->perturbed();
    return &storage;
  }
  return nullptr;
}

}  // namespace brl
