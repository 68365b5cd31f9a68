#include "brl/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>

namespace brl {

std::vector<std::vector<int>> neighbor_lists(const std::vector<Vector>& points, double eta,
                                             Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  const double eta2 = eta * eta;
  std::vector<std::vector<int>> out(points.size());
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& row = out[static_cast<std::size_t>(i)];
    const auto& xi = points[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if ((xi - points[static_cast<std::size_t>(j)]).squaredNorm() <= eta2)
        row.push_back(static_cast<int>(j));
    }
  }
  return out;
}

CoverResult greedy_cover(const std::vector<Vector>& samples, double eta, double delta, Exec exec) {
  if (samples.empty()) throw Error("greedy_cover: no samples");
  if (!(eta > 0.0)) throw Error("greedy_cover: eta must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw Error("greedy_cover: delta must lie in [0, 1)");

  const std::size_t n = samples.size();
  const auto needed = static_cast<std::size_t>(
      std::max(1.0, std::ceil((1.0 - delta) * static_cast<double>(n) - 1e-9)));
  const auto nbrs = neighbor_lists(samples, eta, exec);

  std::vector<std::size_t> gain(n);
  for (std::size_t i = 0; i < n; ++i) gain[i] = nbrs[i].size();
  std::vector<char> covered(n, 0);
  std::size_t n_covered = 0;

  CoverResult result;
  result.eta = eta;
  result.delta = delta;
  while (n_covered < needed) {
    // max_element returns the first maximum, i.e. the lowest index.
    const auto best = static_cast<std::size_t>(
        std::max_element(gain.begin(), gain.end()) - gain.begin());
    result.center_indices.push_back(best);
    for (const int p : nbrs[best]) {
      const auto pi = static_cast<std::size_t>(p);
      if (covered[pi]) continue;
      covered[pi] = 1;
      ++n_covered;
      for (const int c : nbrs[pi]) --gain[static_cast<std::size_t>(c)];
    }
  }
  result.count = result.center_indices.size();
  result.covered_fraction = static_cast<double>(n_covered) / static_cast<double>(n);
  return result;
}

double covered_fraction(const std::vector<Vector>& centers, const std::vector<Vector>& points,
                        double eta) {
  if (points.empty()) return 0.0;
  const double eta2 = eta * eta;
  std::size_t hit = 0;
  for (const auto& p : points) {
    for (const auto& c : centers) {
      if ((p - c).squaredNorm() <= eta2) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(points.size());
}

namespace {

constexpr std::size_t kMaxExhaustivePoints = 22;

double mask_mass(std::uint32_t mask, const std::vector<double>& w) {
  double mass = 0.0;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) mass += w[i];
  return mass;
}

struct CoverSearch {
  const std::vector<std::uint32_t>& masks;
  const std::vector<std::uint32_t>& suffix_union;
  const std::vector<double>& weights;
  double target;

  bool search(std::size_t start, int remaining, std::uint32_t current) const {
    if (mask_mass(current, weights) >= target) return true;
    if (remaining == 0 || start >= masks.size()) return false;
    if (mask_mass(current | suffix_union[start], weights) < target) return false;
    for (std::size_t i = start; i < masks.size(); ++i) {
      if ((masks[i] | current) == current) continue;
      if (search(i + 1, remaining - 1, current | masks[i])) return true;
    }
    return false;
  }
};

}  // namespace

std::size_t exact_cover_dirac(const DiracMixture& prior, double eta, double delta) {
  validate_prior(prior);
  if (!(eta >= 0.0)) throw Error("exact_cover_dirac: eta must be nonnegative");
  if (!(delta >= 0.0 && delta < 1.0)) throw Error("exact_cover_dirac: delta must lie in [0, 1)");

  // The support only contains atoms with positive mass.
  std::vector<Vector> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < prior.points.size(); ++i) {
    if (prior.weights[i] > 0.0) {
      pts.push_back(prior.points[i]);
      w.push_back(prior.weights[i]);
    }
  }
  const double target = 1.0 - delta - 1e-12;
  if (pts.size() == 1) return 1;

  const DiracMixture support{pts, w};
  if (min_separation(support) > 2.0 * eta) {
    std::vector<double> sorted = w;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      acc += sorted[k];
      if (acc >= target) return k + 1;
    }
    return sorted.size();
  }

  if (pts.size() > kMaxExhaustivePoints)
    throw Error("exact_cover_dirac: exhaustive search is limited to " +
                std::to_string(kMaxExhaustivePoints) + " support points, got " +
                std::to_string(pts.size()));

  const std::size_t n = pts.size();
  std::vector<std::uint32_t> masks(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((pts[i] - pts[j]).norm() <= eta) masks[i] |= (1u << j);
  std::vector<std::uint32_t> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] | masks[i];

  const CoverSearch search{masks, suffix, w, target};
  for (std::size_t k = 1; k <= n; ++k)
    if (search.search(0, static_cast<int>(k), 0)) return k;
  return n;
}

namespace {

void check_cov_args(double eta, double delta) {
  if (!(eta > 0.0)) throw Error("covering bound: eta must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("covering bound: delta must lie in (0, 1]");
}

}  // namespace

double analytic_cov_lipschitz(int k, double lipschitz, double eta, double delta) {
  check_cov_args(eta, delta);
  if (k < 1) throw Error("analytic_cov_lipschitz: k must be positive");
  if (lipschitz < 0.0) throw Error("analytic_cov_lipschitz: L must be nonnegative");
  const double dk = k;
  const double t = 1.0 + std::sqrt(2.0 / dk * std::log(1.0 / delta));
  return dk * std::log(1.0 + 2.0 * std::sqrt(dk) * lipschitz / eta * t);
}

double analytic_cov_sparse(int n, int s, double eta, double delta) {
  check_cov_args(eta, delta);
  if (s < 1 || s > n) throw Error("analytic_cov_sparse: need 1 <= s <= n");
  const double ds = s;
  const double t = 1.0 + std::sqrt(2.0 / ds * std::log(1.0 / delta));
  return ds * (std::log(std::numbers::e * n / ds) + std::log(1.0 + 2.0 * std::sqrt(ds) / eta * t));
}

double analytic_cov_gaussian(int n, double sigma, double eta, double delta) {
  check_cov_args(eta, delta);
  if (n < 1) throw Error("analytic_cov_gaussian: n must be positive");
  if (sigma < 0.0) throw Error("analytic_cov_gaussian: sigma must be nonnegative");
  const double dn = n;
  const double t = 1.0 + std::sqrt(2.0 / dn * std::log(1.0 / delta));
  return dn * std::log(1.0 + 2.0 * std::sqrt(dn) * sigma * t / eta);
}

long long mixture_cov_bound(std::span<const long long> component_counts) {
  if (component_counts.empty()) throw Error("mixture_cov_bound: no components");
  return std::accumulate(component_counts.begin(), component_counts.end(), 0LL);
}

}  // namespace brl
