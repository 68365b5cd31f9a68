#include "brl/config.hpp"
#include "brl/covering.hpp"
#include "brl/experiments.hpp"
#include "brl/verify.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;

brl::ExperimentConfig load_config(const std::string& path) {
  auto config = brl::parse_config(brl::read_file(path));
  if (const char* env = std::getenv("BRL_SEED")) {
    const std::string text = env;
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-')
      throw brl::Error("BRL_SEED must be a nonnegative integer, got '" + text + "'");
    config.master_seed = seed;
  }
  return config;
}

brl::PriorSpec load_prior(const std::string& path) {
  brl::Json j;
  try {
    j = brl::Json::parse(brl::read_file(path));
  } catch (const brl::Json::parse_error& e) {
    throw brl::Error(std::string("prior config: invalid JSON: ") + e.what());
  }
  // Either a bare prior object or a full experiment config.
  if (j.is_object() && j.contains("real_prior")) return brl::config_from_json(j).real_prior;
  return brl::prior_from_json(j);
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw brl::Error("cannot write '" + path + "'");
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path, int threads) {
  if (threads > 0) omp_set_num_threads(threads);
  const auto config = load_config(config_path);
  const auto report = brl::run_sweep(config, brl::Exec::parallel, [](const brl::SweepRow& row) {
    std::cerr << "m=" << row.m << " failures=" << row.failures << "/" << row.trials
              << " p_hat=" << brl::format_double(row.p_hat) << '\n';
  });
  if (ends_with(out_path, ".csv"))
    write_output(brl::report_to_csv(report), out_path);
  else
    write_output(brl::report_to_json(report).dump(2) + "\n", out_path);
  return kExitOk;
}

int cmd_bound(const std::string& config_path) {
  auto config = load_config(config_path);
  if (config.bound.mode == brl::BoundMode::none) config.bound.mode = brl::BoundMode::theorem_main;
  brl::validate_config(config);
  brl::Json rows = brl::Json::array();
  for (const int m : config.m_values) {
    const auto b = brl::attach_bound(config, m);
    brl::Json row{{"m", m}, {"total", b->total}};
    if (b->breakdown) row["breakdown"] = brl::breakdown_to_json(*b->breakdown);
    rows.push_back(std::move(row));
  }
  const char* mode = config.bound.mode == brl::BoundMode::simplified ? "simplified" : "theorem_main";
  std::cout << brl::Json{{"mode", mode}, {"rows", rows}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_coherence(const std::string& basis_name, int n, std::optional<int> s, const std::string& prior_path,
                  int pairs, std::uint64_t seed) {
  const auto basis = brl::parse_basis(basis_name);
  if (!prior_path.empty()) {
    const auto prior = load_prior(prior_path);
    if (n == 0) n = brl::prior_dimension(prior);
    auto stream = brl::derive_stream(seed, {0});
    const double mu = brl::coherence_empirical(basis, n, prior, pairs, stream);
    std::cout << brl::Json{{"mu", mu}, {"mode", "empirical"}, {"pairs", pairs}}.dump() << '\n';
    return kExitOk;
  }
  if (!s) throw brl::Error("coherence: pass --s for the exact sparse coherence or --prior-config to sample");
  if (n < 1) throw brl::Error("coherence: --n must be positive");
  const double mu = brl::coherence_sparse(basis, n, *s);
  std::cout << brl::Json{{"mu", mu}, {"mode", "exact_sparse"}}.dump() << '\n';
  return kExitOk;
}

int cmd_cover(const std::string& prior_path, double eta, double delta, int samples, std::uint64_t seed) {
  const auto prior = load_prior(prior_path);
  if (samples < 1) throw brl::Error("cover: --samples must be positive");
  std::vector<brl::Vector> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    auto stream = brl::derive_stream(seed, {static_cast<std::uint64_t>(i)});
    points.push_back(brl::sample_prior(prior, stream));
  }
  const auto cover = brl::greedy_cover(points, eta, delta);
  std::cout << brl::Json{{"count", cover.count},
                         {"covered_fraction", cover.covered_fraction},
                         {"eta", eta},
                         {"delta", delta},
                         {"samples", samples}}
                   .dump()
            << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, double d_upp_scale) {
  brl::VerifyOptions options;
  options.seed = seed;
  options.d_upp_scale = d_upp_scale;
  const auto checks = brl::run_verify_suite(suite, options);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << c.to_json().dump() << '\n';
    all_pass = all_pass && c.pass;
  }
  return all_pass ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and bound evaluation for posterior-sampling recovery"};
  app.require_subcommand(1);

  std::string config_path, out_path, prior_path, basis_name, suite;
  int threads = 0;
  int n = 0;
  int s = 0;
  int pairs = 1000;
  int samples = 1000;
  double eta = 0.0;
  double delta = 0.0;
  double d_upp_scale = 1.0;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep over m");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_path, "Output path; .csv selects CSV, anything else JSON");
  run->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);

  auto* bound = app.add_subcommand("bound", "Print the bound breakdown for each m of a config");
  bound->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* coherence = app.add_subcommand("coherence", "Coherence of a basis relative to sparse vectors or a prior");
  coherence->add_option("--basis", basis_name, "identity, hadamard or dct")->required();
  coherence->add_option("--n", n, "Dimension");
  auto* s_opt = coherence->add_option("--s", s, "Sparsity (exact coherence over 2s-sparse vectors)");
  auto* prior_opt = coherence->add_option("--prior-config", prior_path, "Prior JSON for an empirical estimate");
  coherence->add_option("--pairs", pairs, "Sampled pairs for the empirical estimate")->check(CLI::PositiveNumber);
  coherence->add_option("--seed", seed, "Sampling seed");
  s_opt->excludes(prior_opt);

  auto* cover = app.add_subcommand("cover", "Greedy empirical cover of samples from a prior");
  cover->add_option("--prior-config", prior_path, "Prior JSON (bare prior or full config)")->required();
  cover->add_option("--eta", eta, "Ball radius")->required();
  cover->add_option("--delta", delta, "Uncovered mass allowance")->required();
  cover->add_option("--samples", samples, "Number of prior samples")->required();
  cover->add_option("--seed", seed, "Sampling seed");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite, "gauss-noise, gaussian-conc, orthog-conc, separation, tv-sep, main-bound or all")
      ->required();
  verify->add_option("--seed", seed, "Seed");
  verify->add_option("--d-upp-scale", d_upp_scale)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, out_path, threads);
    if (*bound) return cmd_bound(config_path);
    if (*coherence)
      return cmd_coherence(basis_name, n, s_opt->count() ? std::optional<int>(s) : std::nullopt, prior_path,
                           pairs, seed);
    if (*cover) return cmd_cover(prior_path, eta, delta, samples, seed);
    if (*verify) return cmd_verify(suite, seed, d_upp_scale);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
