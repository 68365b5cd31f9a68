#include "brl/verify.hpp"

#include "brl/bounds.hpp"
#include "brl/concentration.hpp"
#include "brl/noise.hpp"
#include "brl/posterior.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace brl {

namespace {

constexpr double kZ99 = 2.5758293035489004;

enum : std::uint64_t {
  kSuiteNoise = 1,
  kSuiteGaussConc = 2,
  kSuiteOrthog = 3,
  kSuiteSeparation = 4,
  kSuiteTv = 5,
  kSuiteMain = 6,
};

VerifyCheck make_check(const char* suite, std::string name, bool pass, Json detail) {
  return VerifyCheck{suite, std::move(name), pass, std::move(detail)};
}

// Counts hits of `event(stream)` over `draws` independent streams.
long long count_hits(std::uint64_t seed, std::initializer_list<std::uint64_t> prefix, long long draws,
                     const std::function<bool(RandomStream&)>& event) {
  const std::uint64_t id = mix_stream_id(prefix);
  long long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long long i = 0; i < draws; ++i) {
    RandomStream s = derive_stream(seed, {id, static_cast<std::uint64_t>(i)});
    if (event(s)) ++hits;
  }
  return hits;
}

Vector random_unit(RandomStream& s, Eigen::Index n) {
  Vector v = draw_gaussian(s, n);
  return v / v.norm();
}

std::vector<VerifyCheck> suite_gauss_noise(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  const long long draws = 100000;
  std::uint64_t cell = 0;
  for (const double sigma : {0.5, 1.0}) {
    for (const int m : {2, 8}) {
      for (const double ratio : {1.2, 1.5, 2.0}) {
        const NoiseSpec spec{sigma, m};
        const double t = ratio * sigma;
        const long long hits = count_hits(o.seed, {kSuiteNoise, 0, cell++}, draws, [&](RandomStream& s) {
          return draw_noise(spec, m, s).norm() >= t;
        });
        const double upper = wilson99_upper(hits, draws);
        const double bound = o.d_upp_scale * d_upp(spec, t);
        out.push_back(make_check("gauss-noise", "d_upp_dominance", upper <= bound,
                                 Json{{"sigma", sigma}, {"m", m}, {"t", t}, {"draws", draws}, {"hits", hits},
                                      {"wilson99_upper", upper}, {"d_upp", bound}}));
      }
    }
  }
  // Density ratio between u (||u|| <= tau) and v (||u - v|| <= eps).
  for (const auto& [sigma, m, tau, eps] : std::vector<std::tuple<double, int, double, double>>{
           {1.0, 2, 1.0, 1.0}, {0.5, 8, 1.0, 0.1}, {1.0, 16, 2.0, 0.05}}) {
    const NoiseSpec spec{sigma, m};
    const double log_bound = std::log(d_shift(spec, eps, tau));
    double worst = -std::numeric_limits<double>::infinity();
    const std::uint64_t id = mix_stream_id({kSuiteNoise, 1, cell++});
    for (int i = 0; i < 10000; ++i) {
      RandomStream s = derive_stream(o.seed, {id, static_cast<std::uint64_t>(i)});
      const Vector u = tau * std::pow(s.next_uniform(), 1.0 / m) * random_unit(s, m);
      // Every fourth pair is pushed to the extreme of the constraint set.
      const bool extreme = i % 4 == 0;
      const Vector dir = extreme ? Vector(-u / u.norm()) : random_unit(s, m);
      const double r = extreme ? eps : eps * std::pow(s.next_uniform(), 1.0 / m);
      const Vector v = u + r * dir;
      worst = std::max(worst, log_density(spec, u) - log_density(spec, v));
    }
    out.push_back(make_check("gauss-noise", "d_shift_dominance", worst <= log_bound + 1e-9,
                             Json{{"sigma", sigma}, {"m", m}, {"tau", tau}, {"eps", eps},
                                  {"max_log_ratio", worst}, {"log_d_shift", log_bound}}));
  }
  return out;
}

std::vector<VerifyCheck> suite_gaussian_conc(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  const int n = 8;
  const int n_A = 10000;
  std::uint64_t cell = 0;
  for (const int m : {4, 16, 64}) {
    for (const double t : {0.5, 0.9, 1.1, 2.0}) {
      const Side side = t < 1.0 ? Side::low : Side::upp;
      const auto exact = gaussian_exact_conc(t, m, side);
      const DirectionSampler dirs = [n](RandomStream& s) { return draw_gaussian(s, n); };
      const auto mc = estimate_conc_mc(SubgaussianSpec{}, m, n, dirs, t, side, 1, n_A,
                                       derive_stream(o.seed, {kSuiteGaussConc, cell++}));
      const double se = binomial_std_err(exact.value, n_A);
      const double gap = std::abs(mc.value - exact.value);
      out.push_back(make_check("gaussian-conc", "exact_agreement", gap <= 3.0 * se + 1e-15,
                               Json{{"m", m}, {"t", t}, {"side", std::string(to_string(side))}, {"n_A", n_A},
                                    {"mc", mc.value}, {"exact", exact.value}, {"std_err", se}}));
    }
  }
  return out;
}

std::vector<VerifyCheck> suite_orthog_conc(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  const int n = 256;
  const int s = 4;
  const int n_x = 20;
  const int n_A = 10000;
  const double mu = coherence_sparse(Basis::hadamard, n, s);
  const DirectionSampler sparse_dirs = [n, s](RandomStream& st) {
    Vector x = Vector::Zero(n);
    for (const int i : sample_support(n, 2 * s, st)) x[i] = st.next_normal();
    return x;
  };
  std::uint64_t cell = 0;
  for (const int m : {32, 64}) {
    for (const double t : {0.5, 1.5}) {
      const Side side = t < 1.0 ? Side::low : Side::upp;
      const auto bound = bernstein_orthog_bound(t, m, mu, side);
      const auto mc = estimate_conc_mc(SubsampledSpec{Basis::hadamard}, m, n, sparse_dirs, t, side, n_x, n_A,
                                       derive_stream(o.seed, {kSuiteOrthog, cell++}));
      const auto hits = std::llround(mc.value * n_A);
      const double upper = wilson99_upper(hits, n_A);
      out.push_back(make_check("orthog-conc", "bernstein_dominance", bound.vacuous || upper <= bound.value,
                               Json{{"m", m}, {"t", t}, {"side", std::string(to_string(side))}, {"mu", mu},
                                    {"n_x", n_x}, {"n_A", n_A}, {"mc_estimate", mc.value}, {"std_err", mc.std_err},
                                    {"wilson99_upper", upper},
                                    {"bound", bound.value}, {"vacuous", bound.vacuous}}));
    }
  }
  return out;
}

std::vector<VerifyCheck> suite_separation(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  const int n = 16;
  const int m = 8;
  const double sigma = 1.0;
  const long long trials = 100000;
  RandomStream setup = derive_stream(o.seed, {kSuiteSeparation, 0});
  const DrawnOperator a = draw_operator(SubgaussianSpec{}, m, n, setup);
  const Vector dir = draw_gaussian(setup, n);
  const NoiseSpec noise{sigma, m};
  std::uint64_t cell = 1;
  for (const double delta_param : {0.5, 1.0, 2.0, 4.0}) {
    // ||A(x1 - x2)|| sqrt(m) / sigma = delta_param.
    const double scale = delta_param * sigma / (std::sqrt(static_cast<double>(m)) * a.apply(dir).norm());
    const DiracMixture prior{{Vector::Zero(n), scale * dir}, {0.5, 0.5}};
    const std::vector<Vector> images{a.apply(prior.points[0]), a.apply(prior.points[1])};
    const long long mismatches = count_hits(o.seed, {kSuiteSeparation, cell++}, trials, [&](RandomStream& s) {
      const std::size_t i = sample_index(prior.weights, s);
      const Vector y = images[i] + draw_noise(noise, m, s);
      const auto post = posterior_dirac(prior, images, y, noise);
      return sample_index(posterior_weights(post.log_weights), s) != i;
    });
    const double p = static_cast<double>(mismatches) / trials;
    const double bound = 1.0 - tv_gaussian_shift(delta_param);
    const double se = binomial_std_err(p, trials);
    out.push_back(make_check("separation", "mismatch_below_one_minus_tv", p <= bound + 3.0 * se,
                             Json{{"Delta", delta_param}, {"trials", trials}, {"p_hat", p}, {"std_err", se},
                                  {"one_minus_tv", bound}}));
  }
  return out;
}

std::vector<VerifyCheck> suite_tv_sep(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  const int n = 32;
  const int m = 16;
  const double sigma = 0.5;
  const double eta = 0.1;
  const int draws = 1000;
  const NoiseSpec noise{sigma, m};
  std::uint64_t cell = 0;
  for (const double c : {4.0, 16.0}) {
    Vector x_ext = Vector::Zero(n);
    x_ext[0] = c * (eta + sigma);
    std::vector<double> tv(static_cast<std::size_t>(draws));
    const std::uint64_t id = mix_stream_id({kSuiteTv, cell++});
#pragma omp parallel for schedule(static)
    for (int i = 0; i < draws; ++i) {
      RandomStream s = derive_stream(o.seed, {id, static_cast<std::uint64_t>(i)});
      const DrawnOperator a = draw_operator(SubgaussianSpec{}, m, n, s);
      tv[static_cast<std::size_t>(i)] = tv_gaussian_shift(a.apply(x_ext).norm() * std::sqrt(static_cast<double>(m)) / sigma);
    }
    double mean = 0.0;
    for (const double v : tv) mean += v;
    mean /= draws;
    double var = 0.0;
    for (const double v : tv) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (draws - 1) / draws);
    const double c_low = gaussian_exact_conc(2.0 / std::sqrt(c), m, Side::low).value;
    const double c_upp = gaussian_exact_conc(std::sqrt(c) / 2.0, m, Side::upp).value;
    const double d_in = std::min(1.0, o.d_upp_scale * d_upp(noise, std::sqrt(c) * sigma / 2.0));
    const double bound = tv_separation_lower_bound(c, c_low, c_upp, d_in);
    out.push_back(make_check("tv-sep", "mean_tv_above_bound", mean >= bound - 3.0 * se,
                             Json{{"c", c}, {"m", m}, {"draws", draws}, {"mean_tv", mean}, {"std_err", se},
                                  {"bound", bound}}));
  }
  return out;
}

std::vector<VerifyCheck> suite_main_bound(const VerifyOptions& o) {
  std::vector<VerifyCheck> out;
  {
    BoundInputs in;
    in.delta = 0.1;
    in.k = std::log(16.0);
    in.c = 32.0;
    in.sigma = 1.0;
    const auto b = theorem_main_bound(in, 0.0, 0.01, 1.0, 0.001, 0.001, 0.001);
    out.push_back(make_check("main-bound", "assembly_arithmetic", std::abs(b.total - 0.338) <= 1e-12,
                             Json{{"total", b.total}, {"expected", 0.338}}));
  }
  ExperimentConfig config;
  DiracMixture atoms;
  const int n = 128;
  for (int i = 0; i < 16; ++i) {
    Vector p = Vector::Zero(n);
    p[i] = 15.0;
    atoms.points.push_back(std::move(p));
  }
  atoms.weights.assign(16, 1.0 / 16.0);
  config.real_prior = atoms;
  config.op = SubgaussianSpec{};
  config.sigma = 0.5;
  config.eta = 0.01;
  config.threshold_factor = 34.0;
  config.m_values = {10, 20, 30};
  config.trials = 500;
  config.master_seed = derive_stream(o.seed, {kSuiteMain}).stream_id;
  config.bound.mode = BoundMode::theorem_main;
  config.bound.delta = 0.01;
  config.bound.c_prime = 2.0;
  config.bound.t = 2.0;
  const auto report = run_sweep(config);
  for (const auto& row : report.rows) {
    BoundBreakdown b = *row.breakdown;
    if (o.d_upp_scale != 1.0) {
      BoundInputs in;
      in.delta = config.bound.delta;
      in.eta = config.eta;
      in.sigma = config.sigma;
      in.c = config.threshold_factor - 2.0;
      in.k = std::log(16.0);
      in.m = row.m;
      b = theorem_main_bound(in, b.term_c_abs, o.d_upp_scale * b.term_d_upp_cprime, b.term_shift_factor,
                             b.term_c_low, b.term_c_upp, o.d_upp_scale * b.term_d_upp_inner);
    }
    const double se = binomial_std_err(b.total_clamped, row.trials);
    const bool applicable = b.total < 1.0;
    out.push_back(make_check("main-bound", "end_to_end_dominance", !applicable || row.p_hat <= b.total + 3.0 * se,
                             Json{{"m", row.m}, {"trials", row.trials}, {"failures", row.failures},
                                  {"p_hat", row.p_hat}, {"total", b.total}, {"std_err", se},
                                  {"applicable", applicable}}));
  }
  return out;
}

using SuiteFn = std::vector<VerifyCheck> (*)(const VerifyOptions&);

const std::map<std::string, SuiteFn>& suites() {
  static const std::map<std::string, SuiteFn> table{
      {"gauss-noise", suite_gauss_noise}, {"gaussian-conc", suite_gaussian_conc},
      {"orthog-conc", suite_orthog_conc}, {"separation", suite_separation},
      {"tv-sep", suite_tv_sep},           {"main-bound", suite_main_bound}};
  return table;
}

}  // namespace

Json VerifyCheck::to_json() const {
  return Json{{"suite", suite}, {"check", name}, {"pass", pass}, {"detail", detail}};
}

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"gauss-noise", "gaussian-conc", "orthog-conc",
                                              "separation",  "tv-sep",        "main-bound"};
  return names;
}

double wilson99_upper(long long hits, long long trials) { return wilson_interval(hits, trials, kZ99).second; }

std::vector<VerifyCheck> run_verify_suite(const std::string& suite, const VerifyOptions& options) {
  if (suite == "all") {
    std::vector<VerifyCheck> all;
    for (const auto& name : verify_suite_names()) {
      auto part = suites().at(name)(options);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  const auto it = suites().find(suite);
  if (it == suites().end()) {
    std::string known;
    for (const auto& name : verify_suite_names()) known += (known.empty() ? "" : ", ") + name;
    throw Error("unknown verify suite '" + suite + "' (expected one of " + known + ", all)");
  }
  return it->second(options);
}

}  // namespace brl
