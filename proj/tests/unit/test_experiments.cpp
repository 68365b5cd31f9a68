#include "brl/concentration.hpp"
#include "brl/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace brl;

namespace {

DiracMixture scaled_basis_atoms(int n, int count, double scale) {
  DiracMixture d;
  for (int i = 0; i < count; ++i) {
    Vector p = Vector::Zero(n);
    p[i] = scale;
    d.points.push_back(std::move(p));
  }
  d.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return d;
}

ExperimentConfig atoms_config() {
  ExperimentConfig c;
  c.real_prior = scaled_basis_atoms(32, 8, 10.0);
  c.op = SubgaussianSpec{};
  c.sigma = 0.5;
  c.eta = 0.01;
  c.m_values = {2, 8};
  c.trials = 200;
  c.master_seed = 17;
  return c;
}

}  // namespace

TEST_CASE("wilson interval") {
  const double z = 1.959963984540054;
  const auto [lo, hi] = wilson_interval(10, 100, z);
  // Closed form with n = 100, p = 0.1.
  const double denom = 1 + z * z / 100;
  const double center = (0.1 + z * z / 200) / denom;
  const double half = z / denom * std::sqrt(0.09 / 100 + z * z / 40000);
  CHECK(lo == doctest::Approx(center - half).epsilon(1e-14));
  CHECK(hi == doctest::Approx(center + half).epsilon(1e-14));
  CHECK(lo == doctest::Approx(0.0552).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.1744).epsilon(1e-3));

  const auto zero = wilson_interval(0, 1000, z);
  CHECK(zero.first == 0.0);
  CHECK(zero.second == doctest::Approx(z * z / (1000 + z * z)).epsilon(1e-12));
  const auto all = wilson_interval(50, 50, z);
  CHECK(all.second == 1.0);
  CHECK_THROWS_AS(wilson_interval(3, 2, z), Error);
  CHECK_THROWS_AS(wilson_interval(0, 0, z), Error);
}

TEST_CASE("config validation") {
  auto c = atoms_config();
  CHECK_NOTHROW(validate_config(c));
  c.m_values = {};
  CHECK_THROWS_AS(validate_config(c), Error);
  c = atoms_config();
  c.op = SubsampledSpec{Basis::hadamard};
  c.m_values = {64};
  CHECK_THROWS_AS(validate_config(c), Error);
  c = atoms_config();
  c.real_prior = SparseGaussian{32, 2};
  CHECK_THROWS_AS(validate_config(c), Error);
  c.posterior_mode = PosteriorMode::particles;
  CHECK_NOTHROW(validate_config(c));
  c = atoms_config();
  c.op = SubgaussianSpec{SubgaussianKind::rademacher};
  c.bound.mode = BoundMode::theorem_main;
  CHECK_THROWS_AS(validate_config(c), Error);
  c.op = SubgaussianSpec{};
  CHECK_NOTHROW(validate_config(c));
  c.bound.delta = 0.3;
  CHECK_THROWS_AS(validate_config(c), Error);
  c.bound.mode = BoundMode::simplified;
  CHECK_NOTHROW(validate_config(c));
  c.eta = 0.0;
  CHECK_THROWS_AS(validate_config(c), Error);
}

TEST_CASE("trials") {
  ExperimentConfig single = atoms_config();
  single.real_prior = DiracMixture{{Vector::Constant(16, 3.0)}, {1.0}};
  for (long long t = 0; t < 20; ++t) {
    const auto r = run_trial(single, 4, t);
    CHECK(r.error_norm == 0.0);
    CHECK_FALSE(r.failed);
    CHECK(r.q == 4);
  }

  const auto c = atoms_config();
  const auto a = run_trial(c, 8, 5);
  const auto b = run_trial(c, 8, 5);
  CHECK(a.error_norm == b.error_norm);
  CHECK(trial_stream(1, 8, 5, StreamRole::op) != trial_stream(1, 8, 5, StreamRole::noise));
  CHECK(trial_stream(1, 8, 5, StreamRole::op) != trial_stream(1, 8, 6, StreamRole::op));

  // Error is either 0 (correct atom) or the atom spacing.
  for (long long t = 0; t < 50; ++t) {
    const double e = run_trial(c, 2, t).error_norm;
    CHECK((e == 0.0 || std::abs(e - 10.0 * std::sqrt(2.0)) < 1e-9));
  }
}

TEST_CASE("coupled priors share the atom index") {
  ExperimentConfig c = atoms_config();
  const auto base = scaled_basis_atoms(32, 8, 10.0);
  PerturbedPrior real{base, {}, 0.2};
  for (int i = 0; i < 8; ++i) {
    Vector o = Vector::Zero(32);
    o[31] = 0.1 * (i % 3);
    real.offsets.push_back(o);
  }
  c.real_prior = real;
  c.model_prior = base;
  CHECK(is_coupled(c));
  for (long long t = 0; t < 30; ++t) CHECK(run_trial(c, 8, t).coupled_distance <= 0.2 + 1e-15);
  c.model_prior = scaled_basis_atoms(32, 8, 11.0);
  CHECK_FALSE(is_coupled(c));
}

TEST_CASE("sweep is identical on both execution paths") {
  auto c = atoms_config();
  c.bound.mode = BoundMode::theorem_main;
  c.bound.delta = 0.01;
  const auto serial = run_sweep(c, Exec::serial);
  const auto parallel = run_sweep(c, Exec::parallel);
  REQUIRE(serial.rows.size() == 2);
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].failures == parallel.rows[i].failures);
    CHECK(serial.rows[i].bound_total == parallel.rows[i].bound_total);
    CHECK(serial.rows[i].wilson_low <= serial.rows[i].p_hat);
    CHECK(serial.rows[i].p_hat <= serial.rows[i].wilson_high);
    CHECK(serial.rows[i].threshold == doctest::Approx(34 * 0.51));
  }
  int calls = 0;
  run_sweep(c, Exec::serial, [&calls](const SweepRow&) { ++calls; });
  CHECK(calls == 2);
}

TEST_CASE("attached bounds") {
  auto c = atoms_config();
  CHECK_FALSE(attach_bound(c, 8).has_value());

  c.bound.mode = BoundMode::theorem_main;
  c.bound.delta = 0.01;
  const auto b = attach_bound(c, 20);
  REQUIRE(b);
  REQUIRE(b->breakdown);
  // Atoms are 14.1 apart, eta = 0.01: each atom needs its own ball.
  CHECK(b->breakdown->term_exp_k == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(b->breakdown->term_c_abs == 0.0);
  BoundInputs in;
  in.delta = 0.01;
  in.eta = 0.01;
  in.sigma = 0.5;
  in.k = std::log(8.0);
  in.m = 20;
  CHECK(b->total == theorem_main_gaussian(in).total);

  c.bound.log_cover = std::log(3.0);
  CHECK(attach_bound(c, 20)->breakdown->term_exp_k == doctest::Approx(3.0));

  c = atoms_config();
  c.op = SubsampledSpec{Basis::hadamard};
  c.bound.mode = BoundMode::theorem_main;
  c.bound.delta = 0.01;
  const auto h = attach_bound(c, 16);
  REQUIRE(h);
  // Differences e_i - e_j: ||H d||_inf^2 / ||d||^2 = (2/sqrt(32))^2 / 2.
  const double mu = 32.0 * (4.0 / 32.0) / 2.0;
  CHECK(h->breakdown->term_c_low ==
        doctest::Approx(bernstein_orthog_bound(main_low_arg(32.0), 16, mu, Side::low).value).epsilon(1e-14));

  c = atoms_config();
  c.bound.mode = BoundMode::simplified;
  c.m_values = {64};
  const auto s = attach_bound(c, 64);
  REQUIRE(s);
  CHECK_FALSE(s->breakdown);
  CHECK(s->total == doctest::Approx(theorem_simplified_expression(2.0, 0.01, 0.5, 0.05, 8.0,
                                                                  gaussian_exact_conc(0.5, 64, Side::low).value,
                                                                  gaussian_exact_conc(2.0, 64, Side::upp).value, 64)));
  c.threshold_factor = 20.0;
  CHECK_THROWS_AS(attach_bound(c, 64), Error);

  c = atoms_config();
  c.bound.mode = BoundMode::theorem_main;
  c.model_prior = scaled_basis_atoms(32, 8, 11.0);
  CHECK_THROWS_AS(attach_bound(c, 8), Error);
  c.bound.eps = 0.0;
  CHECK_NOTHROW(attach_bound(c, 8));
}
