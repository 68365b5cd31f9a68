#include "brl/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace brl {

std::string_view to_string(Side side) { return side == Side::low ? "low" : "upp"; }

std::string_view to_string(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::exact: return "exact";
    case EstimateKind::analytic_bound: return "analytic_bound";
    case EstimateKind::monte_carlo: return "monte_carlo";
  }
  return "exact";
}

double binomial_std_err(double p, long long trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

ConcentrationEstimate gaussian_exact_conc(double t, int m, Side side) {
  if (!(t > 0.0)) throw Error("gaussian_exact_conc: t must be positive");
  if (m < 1) throw Error("gaussian_exact_conc: m must be positive");
  ConcentrationEstimate est;
  est.t = t;
  est.kind = EstimateKind::exact;
  const double x = m * t * t;
  est.value = side == Side::low ? chi_square_cdf(x, m) : chi_square_sf(x, m);
  return est;
}

ConcentrationEstimate bernstein_orthog_bound(double t, int m, double mu, Side side) {
  if (!(t > 0.0)) throw Error("bernstein_orthog_bound: t must be positive");
  if (m < 1) throw Error("bernstein_orthog_bound: m must be positive");
  if (!(mu >= 1.0)) throw Error("bernstein_orthog_bound: coherence must be at least 1");
  ConcentrationEstimate est;
  est.t = t;
  est.kind = EstimateKind::analytic_bound;
  const double s = side == Side::upp ? t * t - 1.0 : 1.0 - t * t;
  if (!(s > 0.0)) {
    est.value = 1.0;
    est.vacuous = true;
    return est;
  }
  const double exponent = (m * s * s / 2.0) / (mu * (1.0 + s / 3.0));
  est.value = std::min(1.0, 2.0 * std::exp(-exponent));
  return est;
}

namespace {

enum : std::uint64_t { kRoleDirection = 1, kRoleOperator = 2 };

// Max over directions of the frequency with which `event(||Ax||, x)` holds.
template <class Event>
ConcentrationEstimate max_event_frequency(const OperatorSpec& spec, int m,
                                          const std::vector<Vector>& directions, int n_A,
                                          const RandomStream& stream, Exec exec, Event event) {
  if (n_A < 1) throw Error("concentration estimate: n_A must be positive");
  std::vector<const Vector*> usable;
  for (const auto& d : directions)
    if (d.norm() >= 1e-12) usable.push_back(&d);
  if (usable.empty()) throw Error("concentration estimate: every sampled direction is zero");

  ConcentrationEstimate est;
  est.kind = EstimateKind::monte_carlo;
  est.n_x = static_cast<int>(usable.size());
  est.n_A = n_A;
  long long best = -1;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const Vector& x = *usable[i];
    const int n = static_cast<int>(x.size());
    long long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static) if (exec == Exec::parallel)
    for (int j = 0; j < n_A; ++j) {
      RandomStream s = derive_stream(stream.master_seed, {stream.stream_id, kRoleOperator, i,
                                                          static_cast<std::uint64_t>(j)});
      const DrawnOperator a = draw_operator(spec, m, n, s);
      if (event(a.apply(x).norm(), x.norm())) ++hits;
    }
    best = std::max(best, hits);
  }
  est.value = static_cast<double>(best) / n_A;
  est.std_err = binomial_std_err(est.value, n_A);
  return est;
}

std::vector<Vector> sample_directions(const DirectionSampler& sampler, int n_x,
                                      const RandomStream& stream) {
  if (n_x < 1) throw Error("concentration estimate: n_x must be positive");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n_x));
  for (int i = 0; i < n_x; ++i) {
    RandomStream s = derive_stream(stream.master_seed,
                                   {stream.stream_id, kRoleDirection, static_cast<std::uint64_t>(i)});
    out.push_back(sampler(s));
  }
  return out;
}

}  // namespace

ConcentrationEstimate estimate_conc_mc(const OperatorSpec& spec, int m,
                                       const std::vector<Vector>& directions, double t,
                                       Side side, int n_A, RandomStream stream, Exec exec) {
  if (!(t >= 0.0)) throw Error("estimate_conc_mc: t must be nonnegative");
  ConcentrationEstimate est =
      side == Side::low
          ? max_event_frequency(spec, m, directions, n_A, stream, exec,
                                [t](double ax, double x) { return ax <= t * x; })
          : max_event_frequency(spec, m, directions, n_A, stream, exec,
                                [t](double ax, double x) { return ax >= t * x; });
  est.t = t;
  return est;
}

ConcentrationEstimate estimate_conc_mc(const OperatorSpec& spec, int m, int n,
                                       const DirectionSampler& directions, double t, Side side,
                                       int n_x, int n_A, RandomStream stream, Exec exec) {
  auto dirs = sample_directions(directions, n_x, stream);
  for (const auto& d : dirs)
    if (d.size() != n) throw Error("estimate_conc_mc: direction dimension mismatch");
  return estimate_conc_mc(spec, m, dirs, t, side, n_A, stream, exec);
}

ConcentrationEstimate c_abs_bound(const OperatorSpec& spec, int m, int n, double s_radius,
                                  double t_threshold, const DirectionSampler& directions,
                                  int n_x, int n_A, RandomStream stream, Exec exec) {
  if (s_radius < 0.0) throw Error("c_abs_bound: radius must be nonnegative");
  ConcentrationEstimate est;
  est.t = t_threshold;
  est.kind = EstimateKind::analytic_bound;
  if (s_radius == 0.0) {
    est.value = t_threshold >= 0.0 ? 0.0 : 1.0;
    return est;
  }
  if (std::holds_alternative<SubsampledSpec>(spec) &&
      t_threshold >= s_radius * std::sqrt(static_cast<double>(n) / m)) {
    est.value = 0.0;
    return est;
  }
  auto dirs = sample_directions(directions, n_x, stream);
  for (auto& d : dirs) {
    if (d.size() != n) throw Error("c_abs_bound: direction dimension mismatch");
    const double norm = d.norm();
    if (norm >= 1e-12) d *= s_radius / norm;
  }
  est = max_event_frequency(spec, m, dirs, n_A, stream, exec,
                            [t_threshold](double ax, double) { return ax > t_threshold; });
  est.t = t_threshold;
  return est;
}

}  // namespace brl
