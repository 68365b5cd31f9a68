#pragma once

#include "brl/bounds.hpp"
#include "brl/operators.hpp"
#include "brl/priors.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace brl {

enum class PosteriorMode { exact, particles };
enum class BoundMode { none, theorem_main, simplified };

struct BoundSettings {
  BoundMode mode = BoundMode::none;
  double delta = 0.05;
  double c_prime = 2.0;
  double t = 2.0;
  double p_order = std::numeric_limits<double>::infinity();
  /// W_p budget between the priors; derived from the coupling when absent.
  std::optional<double> eps;
  /// log Cov_{eta,delta}; computed exactly for finitely supported priors when absent.
  std::optional<double> log_cover;
};

struct ExperimentConfig {
  PriorSpec real_prior;
  std::optional<PriorSpec> model_prior;  // absent: same as real_prior
  OperatorSpec op;
  double sigma = 1.0;
  std::vector<int> m_values;
  double threshold_factor = 34.0;
  double eta = 0.0;
  int trials = 1;
  std::uint64_t master_seed = 0;
  PosteriorMode posterior_mode = PosteriorMode::exact;
  int n_particles = 1000;
  BoundSettings bound;

  const PriorSpec& model() const { return model_prior ? *model_prior : real_prior; }
  double threshold() const { return threshold_factor * (eta + sigma); }
};

/// Throws brl::Error if the config cannot be run.
void validate_config(const ExperimentConfig& config);

/// True when the real prior is a perturbation of the model prior's atoms, so
/// x* and its model counterpart can share one draw.
bool is_coupled(const ExperimentConfig& config);

struct TrialResult {
  double error_norm = 0.0;
  bool failed = false;
  int q = 0;
  int resamples = 0;
  /// ||x*_real - x*_model|| for coupled priors, otherwise 0.
  double coupled_distance = 0.0;
  double effective_sample_size = 0.0;  // particle mode only
};

/// Stream roles; a trial's streams are derive_stream(seed, {m, trial, role}).
enum class StreamRole : std::uint64_t { prior = 0, op = 1, noise = 2, posterior = 3, bound = 4 };

RandomStream trial_stream(std::uint64_t master_seed, int m, long long trial, StreamRole role);

TrialResult run_trial(const ExperimentConfig& config, int m, long long trial_index);

struct SweepRow {
  int m = 0;
  long long trials = 0;
  long long failures = 0;
  double p_hat = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::optional<double> bound_total;
  std::optional<BoundBreakdown> breakdown;  // theorem_main only
  double threshold = 0.0;
  double mean_q = 0.0;
  long long resampled_draws = 0;
  long long degenerate_posteriors = 0;  // particle mode, ESS < 2
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
};

/// Trials run concurrently; per-trial results are stored and aggregated in
/// trial order, so the report does not depend on the thread count.
/// `on_row` (optional) is called after each m completes.
ExperimentReport run_sweep(const ExperimentConfig& config, Exec exec = Exec::parallel,
                           const std::function<void(const SweepRow&)>& on_row = {});

/// Wilson score interval.
std::pair<double, double> wilson_interval(long long failures, long long trials, double z);

/// Bound attached to a sweep row, or nullopt when bound mode is none.
struct AttachedBound {
  double total = 0.0;
  std::optional<BoundBreakdown> breakdown;
};
std::optional<AttachedBound> attach_bound(const ExperimentConfig& config, int m);

}  // namespace brl
