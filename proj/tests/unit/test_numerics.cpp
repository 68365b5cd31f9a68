#include "brl/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <vector>

using namespace brl;

TEST_CASE("philox known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
}

TEST_CASE("random stream is a pure function of its coordinates") {
  RandomStream a{42, 7, 3};
  RandomStream b{42, 7, 3};
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c{42, 8, 3};
  RandomStream d{42, 7, 3};
  CHECK(c.next_u64() != d.next_u64());

  RandomStream s1 = derive_stream(5, {1, 2, 3});
  RandomStream s2 = derive_stream(5, {1, 2, 3});
  CHECK(draw_gaussian(s1, 16) == draw_gaussian(s2, 16));
  CHECK(derive_stream(5, {1, 2, 3}).stream_id != derive_stream(5, {1, 3, 2}).stream_id);
}

TEST_CASE("uniforms are in the open unit interval and next_below is in range") {
  RandomStream s{1, 2, 0};
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = s.next_below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (const int c : counts) CHECK(std::abs(c - 10000) < 4.0 * std::sqrt(70000.0 * (1.0 / 7) * (6.0 / 7)));
}

TEST_CASE("gaussian and rademacher draws") {
  RandomStream s{3, 0, 0};
  const Vector g = draw_gaussian(s, 1000000);
  CHECK(std::abs(g.mean()) < 4.0 / 1000.0);
  const double var = (g.array() - g.mean()).square().sum() / (g.size() - 1);
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / 1e6));
  const Vector r = draw_rademacher(s, 1000);
  for (Eigen::Index i = 0; i < r.size(); ++i) CHECK((r[i] == 1.0 || r[i] == -1.0));
  RandomStream a{9, 9, 9};
  RandomStream b{9, 9, 9};
  CHECK(draw_rademacher(a, 64) == draw_rademacher(b, 64));
}

TEST_CASE("standard normal cdf") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(std_normal_cdf(40.0) - 1.0) <= 1e-15);
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  for (double x = -8.0; x <= 8.0; x += 0.37) CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-12);
}

TEST_CASE("chi-square against boost incomplete gamma") {
  CHECK(chi_square_cdf(0.0, 3) == 0.0);
  CHECK(chi_square_cdf(2.0 * std::log(2.0), 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(chi_square_cdf(1.0, 0), Error);
  for (const int k : {1, 2, 3, 4, 8, 16, 64, 256}) {
    for (const double x : {0.01, 0.5, 1.0, 3.0, 8.0, 16.0, 40.0, 100.0, 300.0, 1000.0}) {
      const double a = k / 2.0;
      CHECK(std::abs(chi_square_cdf(x, k) - boost::math::gamma_p(a, x / 2.0)) <= 1e-12);
      const double q = boost::math::gamma_q(a, x / 2.0);
      CHECK(std::abs(chi_square_sf(x, k) - q) <= 1e-12 * std::max(q, 1e-300) + 1e-300);
    }
  }
}

TEST_CASE("chi-square against Monte Carlo") {
  RandomStream s{11, 0, 0};
  const int draws = 1000000;
  for (const auto& [x, k] : std::vector<std::pair<double, int>>{{1.0, 1}, {4.0, 4}, {16.0, 8}, {5.0, 5}}) {
    long long hits = 0;
    for (int i = 0; i < draws; ++i)
      if (draw_gaussian(s, k).squaredNorm() <= x) ++hits;
    const double p = chi_square_cdf(x, k);
    CHECK(std::abs(static_cast<double>(hits) / draws - p) <= 3.0 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST_CASE("log-sum-exp") {
  const std::vector<double> v{-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-14));
  const std::vector<double> w{0.0, -800.0};
  CHECK(log_sum_exp(w) == doctest::Approx(0.0));
}

namespace {

Matrix hadamard_matrix(int n) {
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < n) {
    Matrix next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = next;
  }
  return h / std::sqrt(static_cast<double>(n));
}

Matrix dct_matrix(int n) {
  Matrix c(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      c(k, j) = (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n)) *
                std::cos(std::numbers::pi * (j + 0.5) * k / n);
  return c;
}

}  // namespace

TEST_CASE("walsh-hadamard transform") {
  Vector e1 = Vector::Zero(4);
  e1[0] = 1.0;
  CHECK(fwht_ortho(e1).isApprox(Vector::Constant(4, 0.5)));
  CHECK_THROWS_AS(fwht_ortho(Vector::Ones(6)), Error);
  RandomStream s{5, 0, 0};
  for (const int n : {1, 2, 8, 64, 1024}) {
    const Matrix h = hadamard_matrix(n);
    for (int rep = 0; rep < 20; ++rep) {
      const Vector v = draw_gaussian(s, n);
      const Vector w = draw_gaussian(s, n);
      CHECK((fwht_ortho(v) - h * v).norm() <= 1e-10 * std::max(1.0, v.norm()));
      CHECK((fwht_ortho(fwht_ortho(v)) - v).norm() <= 1e-10);
      CHECK(std::abs(fwht_ortho(v).norm() - v.norm()) <= 1e-10);
      CHECK(std::abs(fwht_ortho(v).dot(fwht_ortho(w)) - v.dot(w)) <= 1e-9);
    }
  }
}

TEST_CASE("discrete cosine transform") {
  Vector one(1);
  one[0] = 3.5;
  CHECK(dct_ortho(one)[0] == doctest::Approx(3.5));
  const Vector c = dct_ortho(Vector::Constant(10, 2.0));
  CHECK(c[0] == doctest::Approx(2.0 * std::sqrt(10.0)));
  CHECK(c.tail(9).cwiseAbs().maxCoeff() <= 1e-12);
  RandomStream s{6, 0, 0};
  for (const int n : {1, 2, 3, 7, 16, 100, 256}) {
    const Matrix u = dct_matrix(n);
    for (int rep = 0; rep < 10; ++rep) {
      const Vector v = draw_gaussian(s, n);
      const Vector w = draw_gaussian(s, n);
      CHECK((dct_ortho(v) - u * v).norm() <= 1e-10 * std::max(1.0, v.norm()));
      CHECK((dct_ortho(v) - dct_ortho_reference(v)).norm() <= 1e-10 * std::max(1.0, v.norm()));
      CHECK((idct_ortho(v) - u.transpose() * v).norm() <= 1e-10 * std::max(1.0, v.norm()));
      CHECK((idct_ortho_reference(v) - u.transpose() * v).norm() <= 1e-10 * std::max(1.0, v.norm()));
      CHECK((idct_ortho(dct_ortho(v)) - v).norm() <= 1e-10);
      CHECK(std::abs(dct_ortho(v).dot(dct_ortho(w)) - v.dot(w)) <= 1e-9);
    }
  }
}

TEST_CASE("spectral norm against SVD") {
  RandomStream s{8, 0, 0};
  for (int rep = 0; rep < 10; ++rep) {
    Matrix m(12, 7);
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) = draw_gaussian(s, m.rows());
    const double svd = Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
    CHECK(spectral_norm(m) == doctest::Approx(svd).epsilon(1e-6));
  }
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0 / std::sqrt(2.0);
  d(1, 1) = 1.0 / std::sqrt(2.0);
  CHECK(spectral_norm(d) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}
