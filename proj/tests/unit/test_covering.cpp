#include "brl/covering.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace brl;

namespace {

Vector scalar(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

// Smallest number of centers (support points) whose balls carry mass >= 1 - delta.
std::size_t brute_force_cover(const DiracMixture& d, double eta, double delta) {
  const std::size_t n = d.points.size();
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k >= best) continue;
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      bool covered = false;
      for (std::size_t i = 0; i < n && !covered; ++i)
        covered = ((mask >> i) & 1u) && (d.points[i] - d.points[j]).norm() <= eta;
      if (covered) mass += d.weights[j];
    }
    if (mass >= 1.0 - delta - 1e-12) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("greedy cover examples") {
  const std::vector<Vector> same(10, scalar(3.0));
  CHECK(greedy_cover(same, 0.5, 0.0).count == 1);

  std::vector<Vector> clusters;
  for (int i = 0; i < 5; ++i) clusters.push_back(scalar(0.1 * i));
  for (int i = 0; i < 5; ++i) clusters.push_back(scalar(10.0 + 0.1 * i));
  CHECK(greedy_cover(clusters, 1.0, 0.0).count == 2);

  CHECK(greedy_cover({scalar(0.0), scalar(1.0), scalar(2.5)}, 1.0, 0.0).count == 2);
  const auto r = greedy_cover({scalar(0.0), scalar(1.0), scalar(2.0), scalar(3.5)}, 1.0, 0.0);
  CHECK(r.count == 2);
  CHECK(r.center_indices.front() == 1);
  CHECK(r.covered_fraction == 1.0);
}

TEST_CASE("greedy cover serial and parallel kernels agree") {
  RandomStream s{1, 0, 0};
  std::vector<Vector> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(draw_gaussian(s, 3));
  CHECK(neighbor_lists(pts, 0.7, Exec::serial) == neighbor_lists(pts, 0.7, Exec::parallel));
  const auto a = greedy_cover(pts, 0.7, 0.1, Exec::serial);
  const auto b = greedy_cover(pts, 0.7, 0.1, Exec::parallel);
  CHECK(a.center_indices == b.center_indices);
  CHECK(a.covered_fraction >= 0.9);
}

TEST_CASE("greedy centers generalize to held-out samples") {
  const int n = 2000;
  const double delta = 0.1;
  std::vector<Vector> train, held;
  RandomStream s{2, 0, 0};
  for (int i = 0; i < n; ++i) train.push_back(draw_gaussian(s, 2));
  for (int i = 0; i < n; ++i) held.push_back(draw_gaussian(s, 2));
  const auto cover = greedy_cover(train, 0.5, delta);
  std::vector<Vector> centers;
  for (const auto i : cover.center_indices) centers.push_back(train[i]);
  // Centers are fit to the training draw, so allow a small overfitting margin.
  CHECK(covered_fraction(centers, held, 0.5) >= 1.0 - delta - 0.05);
}

TEST_CASE("exact cover examples") {
  CHECK(exact_cover_dirac(DiracMixture{{scalar(4.0)}, {1.0}}, 0.1, 0.0) == 1);
  const DiracMixture four{{scalar(0), scalar(10), scalar(20), scalar(30)}, {0.25, 0.25, 0.25, 0.25}};
  CHECK(exact_cover_dirac(four, 1.0, 0.25) == 3);
  const DiracMixture three{{scalar(0.0), scalar(1.0), scalar(2.5)}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  CHECK(exact_cover_dirac(three, 1.0, 0.0) == 2);
  CHECK(exact_cover_dirac(three, 1.0, 0.0) == brute_force_cover(three, 1.0, 0.0));
}

TEST_CASE("exact cover matches brute force on random instances") {
  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    RandomStream s{100, inst, 0};
    const int n = 2 + static_cast<int>(s.next_below(9));
    DiracMixture d;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d.points.push_back(draw_gaussian(s, 2));
      d.weights.push_back(s.next_uniform());
      total += d.weights.back();
    }
    for (auto& w : d.weights) w /= total;
    // Renormalize the last weight so the sum is 1 to machine precision.
    double partial = 0.0;
    for (int i = 0; i + 1 < n; ++i) partial += d.weights[static_cast<std::size_t>(i)];
    d.weights.back() = 1.0 - partial;
    const double eta = 0.3 + s.next_uniform();
    const double delta = 0.3 * s.next_uniform();
    CHECK(exact_cover_dirac(d, eta, delta) == brute_force_cover(d, eta, delta));
  }
}

TEST_CASE("exact cover is at most the greedy count on exhaustive samples") {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    RandomStream s{200, inst, 0};
    DiracMixture d;
    const int n = 12;
    for (int i = 0; i < n; ++i) d.points.push_back(draw_gaussian(s, 2));
    d.weights.assign(n, 1.0 / n);
    CHECK(exact_cover_dirac(d, 0.8, 0.0) <= greedy_cover(d.points, 0.8, 0.0).count);
  }
}

TEST_CASE("exact cover limits and lipschitz pushforward") {
  DiracMixture big;
  for (int i = 0; i < 30; ++i) big.points.push_back(scalar(0.1 * i));
  big.weights.assign(30, 1.0 / 30);
  CHECK_THROWS_AS(exact_cover_dirac(big, 1.0, 0.0), Error);
  // Well separated: the fast path handles any size.
  for (int i = 0; i < 30; ++i) big.points[static_cast<std::size_t>(i)] = scalar(10.0 * i);
  CHECK(exact_cover_dirac(big, 1.0, 0.1) == 27);

  RandomStream s{3, 0, 0};
  Matrix g(2, 2);
  g << 1.5, 0.3, -0.2, 0.8;
  const double l = spectral_norm(g);
  for (int rep = 0; rep < 10; ++rep) {
    DiracMixture base;
    for (int i = 0; i < 10; ++i) base.points.push_back(draw_gaussian(s, 2));
    base.weights.assign(10, 0.1);
    DiracMixture pushed = base;
    for (auto& p : pushed.points) p = g * p;
    CHECK(exact_cover_dirac(pushed, 0.7, 0.1) <= exact_cover_dirac(base, 0.7 / l, 0.1));
  }
}

TEST_CASE("analytic covering bounds") {
  CHECK(analytic_cov_lipschitz(3, 0.0, 1.0, 0.1) == 0.0);
  CHECK(std::abs(analytic_cov_lipschitz(1, 1.0, 2.0, std::exp(-0.5)) - std::log(3.0)) <= 1e-12);
  CHECK(analytic_cov_lipschitz(4, 2.0, 1.0, 0.1) >= analytic_cov_lipschitz(4, 1.0, 1.0, 0.1));
  CHECK(analytic_cov_lipschitz(4, 1.0, 0.5, 0.1) >= analytic_cov_lipschitz(4, 1.0, 1.0, 0.1));
  CHECK_THROWS_AS(analytic_cov_lipschitz(1, 1.0, 1.0, 0.0), Error);

  CHECK(std::abs(analytic_cov_sparse(16, 2, 2.0 * std::sqrt(2.0), std::exp(-1.0)) - 2.0 * std::log(24.0 * std::exp(1.0))) <=
        1e-12);
  // s = n: first addend n log(e n / n) = n.
  const double eta = 1.0, delta = 0.2;
  const double t = 1.0 + std::sqrt(2.0 / 5 * std::log(1.0 / delta));
  CHECK(std::abs(analytic_cov_sparse(5, 5, eta, delta) - 5.0 * (1.0 + std::log(1.0 + 2.0 * std::sqrt(5.0) * t / eta))) <=
        1e-12);
  CHECK(analytic_cov_sparse(32, 3, 1.0, 0.1) >= analytic_cov_sparse(16, 3, 1.0, 0.1));

  CHECK(analytic_cov_gaussian(5, 0.0, 1.0, 0.1) == 0.0);
  CHECK(std::abs(analytic_cov_gaussian(1, 1.0, 4.0, std::exp(-0.5)) - std::log(2.0)) <= 1e-12);
  for (const int k : {1, 3, 10})
    CHECK(std::abs(analytic_cov_lipschitz(k, 1.0, 0.7, 0.05) - analytic_cov_gaussian(k, 1.0, 0.7, 0.05)) <= 1e-12);
}

TEST_CASE("mixture cover bound") {
  const std::vector<long long> one{5};
  const std::vector<long long> two{2, 3};
  CHECK(mixture_cov_bound(one) == 5);
  CHECK(mixture_cov_bound(two) == 5);

  const DiracMixture a{{scalar(0), scalar(0.5), scalar(3)}, {0.4, 0.3, 0.3}};
  const DiracMixture b{{scalar(10), scalar(10.4)}, {0.5, 0.5}};
  DiracMixture mix;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    mix.points.push_back(a.points[i]);
    mix.weights.push_back(0.5 * a.weights[i]);
  }
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    mix.points.push_back(b.points[i]);
    mix.weights.push_back(0.5 * b.weights[i]);
  }
  const std::vector<long long> parts{static_cast<long long>(exact_cover_dirac(a, 0.6, 0.0)),
                                     static_cast<long long>(exact_cover_dirac(b, 0.6, 0.0))};
  CHECK(static_cast<long long>(exact_cover_dirac(mix, 0.6, 0.0)) <= mixture_cov_bound(parts));
}
