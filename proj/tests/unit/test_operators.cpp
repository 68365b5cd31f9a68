#include "brl/operators.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace brl;

TEST_CASE("identity subsampling with m = n is the identity") {
  RandomStream s{1, 0, 0};
  const auto a = draw_operator(SubsampledSpec{Basis::identity}, 16, 16, s);
  CHECK(a.q() == 16);
  CHECK(a.to_dense().isApprox(Matrix::Identity(16, 16)));
  const Vector x = draw_gaussian(s, 16);
  CHECK(a.apply(x) == x);
  CHECK(a.apply(Vector::Zero(16)).isZero(0.0));
  CHECK(op_norm_bound(a) == 1.0);
}

TEST_CASE("subsampled apply matches the dense rows") {
  RandomStream s{2, 0, 0};
  for (int rep = 0; rep < 100; ++rep) {
    const Basis basis = rep % 3 == 0 ? Basis::identity : (rep % 3 == 1 ? Basis::hadamard : Basis::dct);
    const auto a = draw_operator(SubsampledSpec{basis}, 8, 32, s);
    const Matrix dense = a.to_dense();
    const Vector x = draw_gaussian(s, 32);
    const Vector y = draw_gaussian(s, a.q());
    CHECK((a.apply(x) - dense * x).norm() <= 1e-9);
    CHECK((a.apply_transpose(y) - dense.transpose() * y).norm() <= 1e-9);
  }
  RandomStream t{3, 0, 0};
  CHECK_THROWS_AS(draw_operator(SubsampledSpec{Basis::identity}, 17, 16, t), Error);
  CHECK_THROWS_AS(draw_operator(SubsampledSpec{Basis::hadamard}, 4, 12, t), Error);
  const auto g = draw_operator(SubgaussianSpec{}, 4, 8, t);
  CHECK_THROWS_AS(g.apply(Vector::Zero(7)), Error);
}

TEST_CASE("gaussian operator isotropy") {
  Vector x = Vector::Zero(20);
  x[3] = 1.0;
  const int m = 8;
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    RandomStream s = derive_stream(4, {static_cast<std::uint64_t>(i)});
    sum += draw_operator(SubgaussianSpec{}, m, 20, s).apply(x).squaredNorm();
  }
  CHECK(std::abs(sum / draws - 1.0) <= 4.0 * std::sqrt(2.0 / m) / 100.0);

  RandomStream r{5, 0, 0};
  const auto rad = draw_operator(SubgaussianSpec{SubgaussianKind::rademacher}, 4, 6, r);
  const Matrix& d = *rad.dense_matrix();
  for (Eigen::Index i = 0; i < d.size(); ++i) CHECK(std::abs(std::abs(d.data()[i]) - 0.5) <= 1e-15);
}

TEST_CASE("subsampled row count and isotropy") {
  const int m = 32;
  const int n = 256;
  double q_sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    RandomStream s = derive_stream(6, {static_cast<std::uint64_t>(i)});
    q_sum += draw_operator(SubsampledSpec{Basis::hadamard}, m, n, s).q();
  }
  CHECK(std::abs(q_sum / 10000 - m) <= 4.0 * std::sqrt(m * (1.0 - double(m) / n)) / 100.0);

  // E[A^T A] = I for the dct scheme; A^T A = (n/m) sum_{kept} u_i u_i^T.
  const int n2 = 64;
  const int m2 = 32;
  const Matrix u = basis_matrix(Basis::dct, n2);
  Matrix sum = Matrix::Zero(n2, n2);
  Matrix sum_sq = Matrix::Zero(n2, n2);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    RandomStream s = derive_stream(7, {static_cast<std::uint64_t>(i)});
    const auto a = draw_operator(SubsampledSpec{Basis::dct}, m2, n2, s);
    const Matrix ata = a.to_dense().transpose() * a.to_dense();
    sum += ata;
    sum_sq += ata.cwiseProduct(ata);
  }
  const Matrix mean = sum / draws;
  const Matrix var = sum_sq / draws - mean.cwiseProduct(mean);
  int violations = 0;
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      const double se = std::sqrt(std::max(var(i, j), 0.0) / draws);
      if (std::abs(mean(i, j) - (i == j ? 1.0 : 0.0)) > 5.0 * se + 1e-12) ++violations;
    }
  CHECK(violations == 0);
}

TEST_CASE("operator norm bounds") {
  for (int i = 0; i < 10000; ++i) {
    RandomStream s = derive_stream(8, {static_cast<std::uint64_t>(i)});
    const auto a = draw_operator(SubsampledSpec{Basis::hadamard}, 8, 16, s);
    CHECK(op_norm_bound(a) == std::sqrt(2.0));
    REQUIRE(spectral_norm(a.to_dense()) <= std::sqrt(2.0) + 1e-9);
  }
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0 / std::sqrt(2.0);
  d(1, 1) = 1.0 / std::sqrt(2.0);
  CHECK(op_norm_bound(DrawnOperator::dense(d, 2)) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-6));
  RandomStream s{9, 0, 0};
  CHECK(op_norm_bound(draw_operator(SubsampledSpec{Basis::dct}, 64, 256, s)) == 2.0);
}

TEST_CASE("classical coherence") {
  CHECK(mu_star(Basis::hadamard, 64) == doctest::Approx(1.0));
  CHECK(mu_star(Basis::identity, 32) == 32.0);
  double max_sq = 0.0;
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j) {
      const double a = (k == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8)) * std::cos(std::numbers::pi * (j + 0.5) * k / 8);
      max_sq = std::max(max_sq, a * a);
    }
  CHECK(mu_star(Basis::dct, 8) == doctest::Approx(8.0 * max_sq).epsilon(1e-14));
}

namespace {

// max over rows and all supports of size 2s of the squared row energy.
double brute_force_sparse_coherence(Basis basis, int n, int s) {
  const Matrix u = basis_matrix(basis, n);
  const int k = 2 * s;
  double best = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (const int j : idx) e += u(i, j) * u(i, j);
      best = std::max(best, e);
    }
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int p = pos + 1; p < k; ++p) idx[static_cast<std::size_t>(p)] = idx[static_cast<std::size_t>(p - 1)] + 1;
  }
  return n * best;
}

}  // namespace

TEST_CASE("sparse coherence") {
  CHECK(coherence_sparse(Basis::identity, 64, 4) == 64.0);
  CHECK(coherence_sparse(Basis::hadamard, 64, 4) == doctest::Approx(8.0));
  CHECK(coherence_sparse(Basis::hadamard, 16, 2) == doctest::Approx(brute_force_sparse_coherence(Basis::hadamard, 16, 2)));
  CHECK(coherence_sparse(Basis::hadamard, 16, 2) == doctest::Approx(4.0));
  CHECK(coherence_sparse(Basis::dct, 12, 2) == doctest::Approx(brute_force_sparse_coherence(Basis::dct, 12, 2)));
  CHECK_THROWS_AS(coherence_sparse(Basis::identity, 8, 5), Error);
  for (const Basis b : {Basis::identity, Basis::hadamard, Basis::dct}) {
    for (const int n : {16, 64}) {
      double prev = 0.0;
      for (int s = 1; 2 * s <= n; s *= 2) {
        const double mu = coherence_sparse(b, n, s);
        CHECK(mu <= 2.0 * s * mu_star(b, n) + 1e-9);
        CHECK(mu >= prev - 1e-12);
        prev = mu;
      }
    }
  }
}

TEST_CASE("empirical coherence") {
  Vector e1 = Vector::Zero(16);
  e1[1] = 1.0;
  const DiracMixture two{{Vector::Zero(16), e1}, {0.5, 0.5}};
  RandomStream s{10, 0, 0};
  CHECK(coherence_empirical(Basis::identity, 16, two, 50, s) == doctest::Approx(16.0));
  const DiracMixture one{{e1}, {1.0}};
  CHECK_THROWS_AS(coherence_empirical(Basis::identity, 16, one, 10, s), Error);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream r{seed, 1, 0};
    const double mu = coherence_empirical(Basis::dct, 64, SparseGaussian{64, 4}, 200, r);
    CHECK(mu <= coherence_sparse(Basis::dct, 64, 4) + 1e-9);
    CHECK(mu <= 64.0 + 1e-9);
  }
}
