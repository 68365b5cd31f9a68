#include "brl/experiments.hpp"

#include "brl/concentration.hpp"
#include "brl/covering.hpp"
#include "brl/noise.hpp"
#include "brl/posterior.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace brl {

namespace {

bool same_dirac(const DiracMixture& a, const DiracMixture& b) {
  if (a.points.size() != b.points.size() || a.weights != b.weights) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (a.points[i].size() != b.points[i].size() || a.points[i] != b.points[i]) return false;
  return true;
}

bool exact_posterior_supported(const PriorSpec& p) {
  return std::holds_alternative<DiracMixture>(p) || std::holds_alternative<GaussianMixture>(p) ||
         std::holds_alternative<PerturbedPrior>(p);
}

}  // namespace

bool is_coupled(const ExperimentConfig& config) {
  const auto* real = std::get_if<PerturbedPrior>(&config.real_prior);
  if (!real || !config.model_prior) return false;
  const auto* model = std::get_if<DiracMixture>(&*config.model_prior);
  return model && same_dirac(real->base, *model);
}

void validate_config(const ExperimentConfig& config) {
  validate_prior(config.real_prior);
  const int n = prior_dimension(config.real_prior);
  if (config.model_prior) {
    validate_prior(*config.model_prior);
    if (prior_dimension(*config.model_prior) != n)
      throw Error("config: real and model priors have different dimensions");
  }
  if (!(config.sigma > 0.0) || !std::isfinite(config.sigma)) throw Error("config: sigma must be positive");
  if (!(config.eta >= 0.0) || !std::isfinite(config.eta)) throw Error("config: eta must be nonnegative");
  if (!(config.threshold_factor > 0.0)) throw Error("config: threshold_factor must be positive");
  if (config.trials < 1) throw Error("config: trials must be at least 1");
  if (config.m_values.empty()) throw Error("config: m_values must not be empty");
  for (const int m : config.m_values)
    if (m < 1) throw Error("config: every m must be at least 1");
  if (const auto* s = std::get_if<SubsampledSpec>(&config.op)) {
    check_basis_dimension(s->basis, n);
    for (const int m : config.m_values)
      if (m > n) throw Error("config: subsampled operators need m <= n, got m = " + std::to_string(m));
  }
  if (config.posterior_mode == PosteriorMode::exact && !exact_posterior_supported(config.model()))
    throw Error("config: exact posterior needs a dirac_mixture, gaussian_mixture or perturbed model prior");
  if (config.posterior_mode == PosteriorMode::particles && config.n_particles < 2)
    throw Error("config: n_particles must be at least 2");
  const auto& b = config.bound;
  if (b.mode != BoundMode::none) {
    if (const auto* g = std::get_if<SubgaussianSpec>(&config.op); g && g->kind == SubgaussianKind::rademacher)
      throw Error("config: bounds have no explicit constants for rademacher operators");
    if (!(config.eta > 0.0)) throw Error("config: bounds need eta > 0");
    if (!(b.delta > 0.0 && b.delta < 1.0)) throw Error("config: bound delta must lie in (0, 1)");
    if (b.mode == BoundMode::theorem_main && b.delta > 0.25)
      throw Error("config: theorem_main bound needs delta <= 1/4");
    if (b.eps && !(*b.eps >= 0.0)) throw Error("config: bound eps must be nonnegative");
    if (!(b.p_order >= 1.0)) throw Error("config: bound p_order must be at least 1");
  }
}

RandomStream trial_stream(std::uint64_t master_seed, int m, long long trial, StreamRole role) {
  return derive_stream(master_seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial),
                                     static_cast<std::uint64_t>(role)});
}

TrialResult run_trial(const ExperimentConfig& config, int m, long long trial_index) {
  const auto seed = config.master_seed;
  const int n = prior_dimension(config.real_prior);
  TrialResult r;

  RandomStream prior_stream = trial_stream(seed, m, trial_index, StreamRole::prior);
  Vector x_star;
  if (is_coupled(config)) {
    const auto& p = std::get<PerturbedPrior>(config.real_prior);
    const auto i = sample_index(p.base.weights, prior_stream);
    x_star = p.base.points[i] + p.offsets[i];
    r.coupled_distance = p.offsets[i].norm();
  } else {
    x_star = sample_prior(config.real_prior, prior_stream);
  }

  RandomStream op_stream = trial_stream(seed, m, trial_index, StreamRole::op);
  const DrawnOperator a = draw_operator(config.op, m, n, op_stream);
  r.q = a.q();
  r.resamples = a.resamples();

  const NoiseSpec noise{config.sigma, m};
  RandomStream noise_stream = trial_stream(seed, m, trial_index, StreamRole::noise);
  const Vector y = a.apply(x_star) + draw_noise(noise, a.q(), noise_stream);

  RandomStream post_stream = trial_stream(seed, m, trial_index, StreamRole::posterior);
  const PriorSpec& model = config.model();
  PosteriorModel post;
  if (config.posterior_mode == PosteriorMode::particles) {
    auto particles = posterior_particles(model, a, y, noise, config.n_particles, post_stream);
    r.effective_sample_size = particles.effective_sample_size;
    post = std::move(particles);
  } else if (const auto* g = std::get_if<GaussianMixture>(&model)) {
    post = posterior_gaussian_mixture(*g, a, y, noise);
  } else {
    DiracMixture storage;
    const DiracMixture* d = as_dirac(model, storage);
    if (!d) throw Error("run_trial: exact posterior is not available for this model prior");
    post = posterior_dirac(*d, a, y, noise);
  }
  const Vector x_hat = sample_posterior(post, post_stream);
  r.error_norm = (x_star - x_hat).norm();
  r.failed = r.error_norm >= config.threshold();
  return r;
}

std::pair<double, double> wilson_interval(long long failures, long long trials, double z) {
  if (trials < 1) throw Error("wilson_interval: trials must be positive");
  if (failures < 0 || failures > trials) throw Error("wilson_interval: need 0 <= failures <= trials");
  if (!(z > 0.0)) throw Error("wilson_interval: z must be positive");
  const double nt = static_cast<double>(trials);
  const double p = failures / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
  double low = failures == 0 ? 0.0 : std::max(0.0, center - half);
  double high = failures == trials ? 1.0 : std::min(1.0, center + half);
  return {std::min(low, p), std::max(high, p)};
}

namespace {

struct CoverInfo {
  double log_cover = 0.0;
  bool use_real_support = false;
};

CoverInfo cover_info(const ExperimentConfig& config) {
  CoverInfo info;
  DiracMixture real_storage, model_storage;
  const DiracMixture* real = as_dirac(config.real_prior, real_storage);
  const DiracMixture* model = as_dirac(config.model(), model_storage);
  if (config.bound.log_cover) {
    info.log_cover = *config.bound.log_cover;
    return info;
  }
  if (!real || !model)
    throw Error("bound: log_cover is required unless both priors are finitely supported");
  const auto cov_real = exact_cover_dirac(*real, config.eta, config.bound.delta);
  const auto cov_model = exact_cover_dirac(*model, config.eta, config.bound.delta);
  // Ties follow the model-prior branch.
  info.use_real_support = cov_real < cov_model;
  info.log_cover = std::log(static_cast<double>(std::min(cov_real, cov_model)));
  return info;
}

double bound_eps(const ExperimentConfig& config) {
  if (config.bound.eps) return *config.bound.eps;
  if (is_coupled(config)) return wasserstein_infty_certificate(std::get<PerturbedPrior>(config.real_prior));
  if (!config.model_prior) return 0.0;
  throw Error("bound: eps is required when the real and model priors differ");
}

// Coherence over supp - supp of the prior attaining the cover minimum;
// nullopt when that support has a single atom (no directions).
std::optional<double> support_coherence(const ExperimentConfig& config, Basis basis, bool use_real) {
  DiracMixture storage;
  const DiracMixture* d = as_dirac(use_real ? config.real_prior : config.model(), storage);
  if (!d) throw Error("bound: subsampled operators need a finitely supported prior for the coherence");
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < d->points.size(); ++i)
    if (d->weights[i] > 0.0) pts.push_back(d->points[i]);
  const auto diffs = difference_set(pts, pts, std::numeric_limits<double>::infinity());
  if (diffs.empty()) return std::nullopt;
  return coherence_of_directions(basis, diffs);
}

double conc_value(const ExperimentConfig& config, const std::optional<double>& mu, double t, int m,
                  Side side) {
  if (std::holds_alternative<SubgaussianSpec>(config.op)) return gaussian_exact_conc(t, m, side).value;
  if (!mu) return 0.0;
  return bernstein_orthog_bound(t, m, *mu, side).value;
}

}  // namespace

std::optional<AttachedBound> attach_bound(const ExperimentConfig& config, int m) {
  const auto& settings = config.bound;
  if (settings.mode == BoundMode::none) return std::nullopt;
  const CoverInfo cover = cover_info(config);
  std::optional<double> mu;
  const auto* sub = std::get_if<SubsampledSpec>(&config.op);
  if (sub) mu = support_coherence(config, sub->basis, cover.use_real_support);

  AttachedBound out;
  if (settings.mode == BoundMode::simplified) {
    const double d = std::sqrt((config.threshold_factor - 2.0) / 8.0);
    if (!(d >= 2.0)) throw Error("bound: the simplified form needs threshold_factor >= 34");
    out.total = theorem_simplified_expression(d, config.eta, config.sigma, settings.delta,
                                              std::exp(cover.log_cover),
                                              conc_value(config, mu, 1.0 / d, m, Side::low),
                                              conc_value(config, mu, d, m, Side::upp), m);
    return out;
  }

  BoundInputs in;
  in.delta = settings.delta;
  in.eps = bound_eps(config);
  in.p_order = settings.p_order;
  in.eta = config.eta;
  in.sigma = config.sigma;
  in.c = config.threshold_factor - 2.0;
  in.c_prime = settings.c_prime;
  in.t = settings.t;
  in.k = cover.log_cover;
  in.m = m;
  if (!sub) {
    out.breakdown = theorem_main_gaussian(in);
  } else {
    validate_bound_inputs(in);
    const int n = prior_dimension(config.real_prior);
    const NoiseSpec noise{config.sigma, m};
    const double s = scaled_eps(in);
    double c_abs = 0.0;
    if (s > 0.0) {
      DiracMixture rs, ms;
      const DiracMixture* real = as_dirac(config.real_prior, rs);
      const DiracMixture* model = as_dirac(config.model(), ms);
      std::vector<Vector> diffs;
      if (real && model) diffs = difference_set(real->points, model->points, s);
      if (!diffs.empty()) {
        const DirectionSampler pick = [&diffs](RandomStream& st) {
          return diffs[static_cast<std::size_t>(st.next_below(diffs.size()))];
        };
        c_abs = c_abs_bound(config.op, m, n, s, in.t * s, pick,
                            static_cast<int>(std::min<std::size_t>(diffs.size(), 64)), 2000,
                            trial_stream(config.master_seed, m, -1, StreamRole::bound))
                    .value;
      }
    }
    out.breakdown = theorem_main_bound(
        in, c_abs, d_upp(noise, in.c_prime * in.sigma), d_shift(noise, in.t * s, in.c_prime * in.sigma),
        conc_value(config, mu, main_low_arg(in.c), m, Side::low),
        conc_value(config, mu, main_upp_arg(in.c), m, Side::upp),
        d_upp(noise, main_upp_arg(in.c) * in.sigma));
  }
  out.total = out.breakdown->total;
  return out;
}

namespace {

std::vector<TrialResult> run_trials(const ExperimentConfig& config, int m, Exec exec) {
  const auto trials = static_cast<long long>(config.trials);
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < trials; ++i) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(config, m, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < trials; ++i) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(config, m, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (long long i = 0; i < trials; ++i) {
    if (!errors[static_cast<std::size_t>(i)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
      throw Error("trial failed (m = " + std::to_string(m) + ", trial = " + std::to_string(i) +
                  "): " + e.what());
    }
  }
  return results;
}

}  // namespace

ExperimentReport run_sweep(const ExperimentConfig& config, Exec exec,
                           const std::function<void(const SweepRow&)>& on_row) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;
  report.seed = config.master_seed;
  for (const int m : config.m_values) {
    const auto results = run_trials(config, m, exec);
    SweepRow row;
    row.m = m;
    row.trials = config.trials;
    long long q_sum = 0;
    for (const auto& r : results) {
      row.failures += r.failed ? 1 : 0;
      q_sum += r.q;
      row.resampled_draws += r.resamples;
      if (config.posterior_mode == PosteriorMode::particles && r.effective_sample_size < 2.0)
        ++row.degenerate_posteriors;
    }
    row.p_hat = static_cast<double>(row.failures) / static_cast<double>(row.trials);
    std::tie(row.wilson_low, row.wilson_high) = wilson_interval(row.failures, row.trials, 1.959963984540054);
    row.threshold = config.threshold();
    row.mean_q = static_cast<double>(q_sum) / static_cast<double>(row.trials);
    if (auto b = attach_bound(config, m)) {
      row.bound_total = b->total;
      row.breakdown = b->breakdown;
    }
    if (on_row) on_row(row);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace brl
