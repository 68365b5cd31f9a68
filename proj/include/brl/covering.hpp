#pragma once

#include "brl/numerics.hpp"
#include "brl/priors.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace brl {

/// An eta, delta-approximate cover built from a finite point set.
struct CoverResult {
  std::vector<std::size_t> center_indices;
  double eta = 0.0;
  double delta = 0.0;
  double covered_fraction = 0.0;
  std::size_t count = 0;
};

/// For each point, the indices of points within distance eta (itself included).
/// This is the O(N^2) kernel of greedy_cover.
std::vector<std::vector<int>> neighbor_lists(const std::vector<Vector>& points, double eta,
                                             Exec exec = Exec::parallel);

/// Greedy set cover over the empirical measure: repeatedly take the sample
/// covering the most uncovered samples (lowest index on ties) until at least
/// ceil((1 - delta) N) samples are covered. The count is an upper estimate of
/// the empirical covering number, not the covering number of the prior.
CoverResult greedy_cover(const std::vector<Vector>& samples, double eta, double delta,
                         Exec exec = Exec::parallel);

/// Fraction of `points` within eta of at least one center.
double covered_fraction(const std::vector<Vector>& centers, const std::vector<Vector>& points,
                        double eta);

/// Exact Cov_{eta,delta} of a Dirac mixture with centers at support points.
/// Exhaustive search (with pruning) is limited to 22 support points; when
/// the atoms are more than 2 eta apart the count follows from the sorted
/// weights for any number of atoms.
std::size_t exact_cover_dirac(const DiracMixture& prior, double eta, double delta);

/// Upper bound on log Cov_{eta,delta}(G # N(0, I_k)) for L-Lipschitz G.
double analytic_cov_lipschitz(int k, double lipschitz, double eta, double delta);

/// Upper bound on log Cov_{eta,delta} of the s-sparse Gaussian prior on R^n.
double analytic_cov_sparse(int n, int s, double eta, double delta);

/// Upper bound on log Cov_{eta,delta}(N(0, sigma^2 I_n)).
double analytic_cov_gaussian(int n, double sigma, double eta, double delta);

/// Cov of a mixture is at most the sum of the component covers.
long long mixture_cov_bound(std::span<const long long> component_counts);

}  // namespace brl
