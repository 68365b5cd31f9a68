#include "brl/bounds.hpp"

#include "brl/concentration.hpp"

#include <algorithm>
#include <cmath>

namespace brl {

namespace {

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(std::string("bound: ") + name + " must lie in [0, 1]");
}

long long ceil_count(double v) {
  if (!std::isfinite(v)) throw Error("m condition: non-finite requirement");
  return std::max(0LL, static_cast<long long>(std::ceil(v - 1e-12)));
}

}  // namespace

double scaled_eps(const BoundInputs& in) {
  if (in.eps == 0.0) return 0.0;
  if (std::isinf(in.p_order)) return in.eps;
  if (in.delta == 0.0) return std::numeric_limits<double>::infinity();
  return in.eps / std::pow(in.delta, 1.0 / in.p_order);
}

void validate_bound_inputs(const BoundInputs& in) {
  if (!(in.delta >= 0.0 && in.delta <= 0.25)) throw Error("bound: delta must lie in [0, 1/4]");
  if (!(in.eps >= 0.0)) throw Error("bound: eps must be nonnegative");
  if (!(in.p_order >= 1.0)) throw Error("bound: p_order must be at least 1");
  if (!(in.eta >= 0.0)) throw Error("bound: eta must be nonnegative");
  if (!(in.sigma > 0.0)) throw Error("bound: sigma must be positive");
  if (!(in.c >= 1.0)) throw Error("bound: c must be at least 1");
  if (!(in.c_prime >= 1.0)) throw Error("bound: c_prime must be at least 1");
  if (!(in.t > 0.0)) throw Error("bound: t must be positive");
  if (!std::isfinite(in.k)) throw Error("bound: k must be finite");
  if (in.m < 1) throw Error("bound: m must be positive");
  if (!(in.sigma >= scaled_eps(in)))
    throw Error("bound: sigma must be at least eps / delta^{1/p} = " + std::to_string(scaled_eps(in)));
}

BoundBreakdown theorem_main_bound(const BoundInputs& in, double c_abs, double d_upp_outer,
                                  double d_shift, double c_low, double c_upp,
                                  double d_upp_inner) {
  validate_bound_inputs(in);
  check_probability(c_abs, "c_abs");
  check_probability(d_upp_outer, "d_upp_outer");
  check_probability(c_low, "c_low");
  check_probability(c_upp, "c_upp");
  check_probability(d_upp_inner, "d_upp_inner");
  if (!(d_shift >= 1.0)) throw Error("bound: d_shift must be at least 1");

  BoundBreakdown b;
  b.term_2delta = 2.0 * in.delta;
  b.term_c_abs = c_abs;
  b.term_d_upp_cprime = d_upp_outer;
  b.term_shift_factor = d_shift;
  b.term_exp_k = std::exp(in.k);
  b.term_c_low = c_low;
  b.term_c_upp = c_upp;
  b.term_d_upp_inner = d_upp_inner;
  b.total = b.term_2delta + b.term_c_abs + b.term_d_upp_cprime +
            2.0 * b.term_shift_factor * b.term_exp_k *
                (b.term_c_low + b.term_c_upp + 2.0 * b.term_d_upp_inner);
  b.total_clamped = std::min(b.total, 1.0);
  b.threshold = (in.c + 2.0) * (in.eta + in.sigma);
  return b;
}

double main_low_arg(double c) { return 2.0 * std::sqrt(2.0) / std::sqrt(c); }
double main_upp_arg(double c) { return std::sqrt(c) / (2.0 * std::sqrt(2.0)); }

BoundBreakdown theorem_main_gaussian(const BoundInputs& in) {
  validate_bound_inputs(in);
  const NoiseSpec noise{in.sigma, in.m};
  const double s = scaled_eps(in);
  const double c_abs = s > 0.0 ? gaussian_exact_conc(in.t, in.m, Side::upp).value : 0.0;
  return theorem_main_bound(in, c_abs, d_upp(noise, in.c_prime * in.sigma),
                            d_shift(noise, in.t * s, in.c_prime * in.sigma),
                            gaussian_exact_conc(main_low_arg(in.c), in.m, Side::low).value,
                            gaussian_exact_conc(main_upp_arg(in.c), in.m, Side::upp).value,
                            d_upp(noise, main_upp_arg(in.c) * in.sigma));
}

double theorem_simplified_expression(double d, double eta, double sigma, double delta,
                                     double cov_count, double c_low, double c_upp, int m) {
  if (!(d >= 2.0)) throw Error("simplified bound: d must be at least 2");
  if (!(eta >= 0.0) || !(sigma > 0.0)) throw Error("simplified bound: need eta >= 0, sigma > 0");
  if (!(cov_count >= 0.0)) throw Error("simplified bound: cover count must be nonnegative");
  if (m < 1) throw Error("simplified bound: m must be positive");
  return delta + cov_count * (c_low + c_upp + std::exp(-m / 16.0));
}

double simplified_threshold(double d, double eta, double sigma) {
  return (8.0 * d * d + 2.0) * (eta + sigma);
}

long long m_condition_subgauss(double k_cov_log, double delta, double c_const) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("m condition: delta must lie in (0, 1]");
  if (!(c_const > 0.0)) throw Error("m condition: c_const must be positive");
  return ceil_count(c_const * (k_cov_log + std::log(1.0 / delta)));
}

long long m_condition_orthog(double cov_log, double delta, double mu, double c_const) {
  if (!(mu >= 1.0)) throw Error("m condition: mu must be at least 1");
  return m_condition_subgauss(cov_log, delta, c_const * mu);
}

double tv_gaussian_shift(double delta_param) {
  if (!(delta_param >= 0.0)) throw Error("tv_gaussian_shift: parameter must be nonnegative");
  // 2 Phi(x) - 1 = erf(x / sqrt 2), without cancellation near 0.
  return std::erf(delta_param / (2.0 * std::sqrt(2.0)));
}

double tv_separation_lower_bound(double c, double c_low, double c_upp, double d_upp_inner) {
  if (!(c >= 1.0)) throw Error("tv_separation_lower_bound: c must be at least 1");
  check_probability(c_low, "c_low");
  check_probability(c_upp, "c_upp");
  check_probability(d_upp_inner, "d_upp_inner");
  return std::max(0.0, 1.0 - (c_low + c_upp + 2.0 * d_upp_inner));
}

}  // namespace brl
