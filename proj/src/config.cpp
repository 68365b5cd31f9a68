#include "brl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>

namespace brl {

namespace {

// A JSON value together with its pointer, so errors can name the field.
class Node {
 public:
  Node(const Json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {}

  const Json& json() const { return j_; }
  const std::string& pointer() const { return ptr_; }
  std::string where() const { return ptr_.empty() ? "/" : ptr_; }

  [[noreturn]] void fail(const std::string& what) const { throw Error("config " + where() + ": " + what); }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const auto a : allowed) known = known || key == a;
      if (!known) throw Error("config " + ptr_ + "/" + key + ": unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.contains(key)) throw Error("config " + ptr_ + "/" + key + ": missing required field");
    return Node(j_.at(key), ptr_ + "/" + key);
  }

  Node at(std::size_t i) const { return Node(j_.at(i), ptr_ + "/" + std::to_string(i)); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    if (j_.is_number_unsigned() && j_.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long long>::max()))
      fail("integer out of range");
    return j_.get<long long>();
  }

  int small_int() const {
    const auto v = integer();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::uint64_t u64() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0))
      fail("expected a nonnegative integer");
    return j_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  Vector vector() const {
    const auto n = size();
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  std::vector<double> reals() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
  }

  std::vector<Vector> vectors() const {
    std::vector<Vector> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).vector();
    return out;
  }

  Matrix matrix() const {
    const auto rows = size();
    if (rows == 0) fail("expected a nonempty matrix");
    const auto cols = at(0).size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      const Node row = at(i);
      if (row.size() != cols) row.fail("ragged matrix row");
      for (std::size_t j = 0; j < cols; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).number();
    }
    return m;
  }

 private:
  const Json& j_;
  std::string ptr_;
};

std::vector<double> read_weights(const Node& obj, std::size_t count) {
  if (!obj.has("weights")) return std::vector<double>(count, 1.0 / static_cast<double>(count));
  const Node w = obj.at("weights");
  auto weights = w.reals();
  if (weights.size() != count)
    w.fail("expected " + std::to_string(count) + " weights, got " + std::to_string(weights.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) w.at(i).fail("weights must be nonnegative");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights must sum to 1 (residual " << total - 1.0 << ")";
    w.fail(msg.str());
  }
  return weights;
}

DiracMixture basis_atoms(const Node& g) {
  g.expect_object({"kind", "n", "count", "scale"});
  const int n = g.at("n").small_int();
  const int count = g.at("count").small_int();
  const double scale = g.at("scale").number();
  if (n < 1 || count < 1 || count > n) g.fail("basis_atoms needs 1 <= count <= n");
  DiracMixture d;
  for (int i = 0; i < count; ++i) {
    Vector p = Vector::Zero(n);
    p[i] = scale;
    d.points.push_back(std::move(p));
  }
  d.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return d;
}

// count atoms with disjoint random s-sparse supports and random +-1 entries.
DiracMixture sparse_codebook(const Node& g) {
  g.expect_object({"kind", "n", "s", "count", "seed"});
  const int n = g.at("n").small_int();
  const int s = g.at("s").small_int();
  const int count = g.at("count").small_int();
  const std::uint64_t seed = g.at("seed").u64();
  if (n < 1 || s < 1 || count < 1 || static_cast<long long>(s) * count > n)
    g.fail("sparse_codebook needs s * count <= n");
  RandomStream stream = derive_stream(seed, {0});
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  DiracMixture d;
  for (int a = 0; a < count; ++a) {
    Vector p = Vector::Zero(n);
    for (int k = 0; k < s; ++k)
      p[order[static_cast<std::size_t>(a * s + k)]] = (stream.next_u64() >> 63) ? 1.0 : -1.0;
    d.points.push_back(std::move(p));
  }
  d.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return d;
}

DiracMixture dirac_from(const Node& obj) {
  if (obj.has("generator")) {
    obj.expect_object({"type", "generator"});
    const Node g = obj.at("generator");
    if (!g.json().is_object()) g.fail("expected an object");
    const std::string kind = g.at("kind").string();
    if (kind == "basis_atoms") return basis_atoms(g);
    if (kind == "sparse_codebook") return sparse_codebook(g);
    g.at("kind").fail("unknown generator '" + kind + "' (expected basis_atoms or sparse_codebook)");
  }
  obj.expect_object({"type", "points", "weights"});
  DiracMixture d;
  d.points = obj.at("points").vectors();
  if (d.points.empty()) obj.at("points").fail("at least one point is required");
  d.weights = read_weights(obj, d.points.size());
  return d;
}

Json vectors_json(const std::vector<Vector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return out;
}

Json dirac_json(const DiracMixture& d) {
  return Json{{"type", "dirac_mixture"}, {"points", vectors_json(d.points)}, {"weights", d.weights}};
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    out.push_back(row);
  }
  return out;
}

bool same_vectors(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
  return true;
}

bool same_dirac(const DiracMixture& a, const DiracMixture& b) {
  return same_vectors(a.points, b.points) && a.weights == b.weights;
}

bool same_prior(const PriorSpec& a, const PriorSpec& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& pa) -> bool {
        using T = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<T>(b);
        if constexpr (std::is_same_v<T, DiracMixture>) {
          return same_dirac(pa, pb);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return same_vectors(pa.means, pb.means) && pa.tau == pb.tau && pa.weights == pb.weights;
        } else if constexpr (std::is_same_v<T, SparseGaussian>) {
          return pa.n == pb.n && pa.s == pb.s;
        } else if constexpr (std::is_same_v<T, GenerativePushforward>) {
          if (pa.latent_dim != pb.latent_dim || pa.widths != pb.widths || pa.weight_seed != pb.weight_seed ||
              pa.layers.size() != pb.layers.size())
            return false;
          for (std::size_t l = 0; l < pa.layers.size(); ++l)
            if (pa.layers[l].rows() != pb.layers[l].rows() || pa.layers[l].cols() != pb.layers[l].cols() ||
                pa.layers[l] != pb.layers[l])
              return false;
          return true;
        } else {
          return same_dirac(pa.base, pb.base) && same_vectors(pa.offsets, pb.offsets) && pa.eps == pb.eps;
        }
      },
      a);
}

OperatorSpec operator_from(const Node& obj) {
  if (!obj.json().is_object()) obj.fail("expected an object");
  const std::string type = obj.at("type").string();
  if (type == "gaussian" || type == "rademacher") {
    obj.expect_object({"type"});
    return SubgaussianSpec{type == "gaussian" ? SubgaussianKind::gaussian : SubgaussianKind::rademacher};
  }
  if (type == "subsampled") {
    obj.expect_object({"type", "basis"});
    const Node b = obj.at("basis");
    try {
      return SubsampledSpec{parse_basis(b.string())};
    } catch (const Error& e) {
      b.fail(e.what());
    }
  }
  obj.at("type").fail("unknown operator type '" + type + "' (expected gaussian, rademacher or subsampled)");
}

Json operator_json(const OperatorSpec& op) {
  if (const auto* g = std::get_if<SubgaussianSpec>(&op))
    return Json{{"type", g->kind == SubgaussianKind::gaussian ? "gaussian" : "rademacher"}};
  return Json{{"type", "subsampled"}, {"basis", std::string(to_string(std::get<SubsampledSpec>(op).basis))}};
}

double p_order_from(const Node& n) {
  if (n.json().is_string()) {
    if (n.string() != "inf") n.fail("expected a number or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  return n.number();
}

BoundSettings bound_from(const Node& obj) {
  obj.expect_object({"mode", "delta", "c_prime", "t", "p_order", "eps", "log_cover"});
  BoundSettings b;
  const std::string mode = obj.at("mode").string();
  if (mode == "none") b.mode = BoundMode::none;
  else if (mode == "theorem_main") b.mode = BoundMode::theorem_main;
  else if (mode == "simplified") b.mode = BoundMode::simplified;
  else obj.at("mode").fail("unknown bound mode '" + mode + "' (expected none, theorem_main or simplified)");
  if (obj.has("delta")) b.delta = obj.at("delta").number();
  if (obj.has("c_prime")) b.c_prime = obj.at("c_prime").number();
  if (obj.has("t")) b.t = obj.at("t").number();
  if (obj.has("p_order")) b.p_order = p_order_from(obj.at("p_order"));
  if (obj.has("eps")) b.eps = obj.at("eps").number();
  if (obj.has("log_cover")) b.log_cover = obj.at("log_cover").number();
  return b;
}

std::string_view bound_mode_name(BoundMode m) {
  switch (m) {
    case BoundMode::none: return "none";
    case BoundMode::theorem_main: return "theorem_main";
    case BoundMode::simplified: return "simplified";
  }
  return "none";
}

// Rethrows validation errors from deeper layers with the field they concern.
template <class F>
void at_field(const std::string& pointer, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("config ", 0) == 0) throw;
    throw Error("config " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
  }
}

}  // namespace

PriorSpec prior_from_json(const Json& j, const std::string& pointer) {
  const Node obj(j, pointer);
  if (!j.is_object()) obj.fail("expected an object");
  const std::string type = obj.at("type").string();
  PriorSpec out;
  if (type == "dirac_mixture") {
    out = dirac_from(obj);
  } else if (type == "gaussian_mixture") {
    obj.expect_object({"type", "means", "tau", "weights"});
    GaussianMixture g;
    g.means = obj.at("means").vectors();
    if (g.means.empty()) obj.at("means").fail("at least one mean is required");
    g.tau = obj.at("tau").number();
    g.weights = read_weights(obj, g.means.size());
    out = std::move(g);
  } else if (type == "sparse_gaussian") {
    obj.expect_object({"type", "n", "s"});
    out = SparseGaussian{obj.at("n").small_int(), obj.at("s").small_int()};
  } else if (type == "generative") {
    obj.expect_object({"type", "latent_dim", "widths", "weight_seed", "layers"});
    if (obj.has("layers")) {
      const Node layers = obj.at("layers");
      std::vector<Matrix> ms(layers.size());
      for (std::size_t l = 0; l < ms.size(); ++l) ms[l] = layers.at(l).matrix();
      GenerativePushforward g;
      at_field(layers.pointer(), [&] { g = GenerativePushforward::with_layers(std::move(ms)); });
      g.weight_seed = obj.has("weight_seed") ? obj.at("weight_seed").u64() : 0;
      if (obj.has("latent_dim") && obj.at("latent_dim").small_int() != g.latent_dim)
        obj.at("latent_dim").fail("does not match the first layer");
      out = std::move(g);
    } else {
      const int k = obj.at("latent_dim").small_int();
      const Node w = obj.at("widths");
      std::vector<int> widths(w.size());
      for (std::size_t i = 0; i < widths.size(); ++i) widths[i] = w.at(i).small_int();
      const auto seed = obj.at("weight_seed").u64();
      at_field(pointer, [&] { out = GenerativePushforward::from_seed(k, widths, seed); });
    }
  } else if (type == "perturbed") {
    obj.expect_object({"type", "base", "offsets", "eps"});
    PerturbedPrior p;
    const Node base = obj.at("base");
    if (!base.json().is_object()) base.fail("expected an object");
    if (!base.has("type") || base.at("type").string() != "dirac_mixture") base.fail("base must be a dirac_mixture");
    p.base = dirac_from(base);
    p.offsets = obj.at("offsets").vectors();
    p.eps = obj.at("eps").number();
    out = std::move(p);
  } else {
    obj.at("type").fail("unknown prior type '" + type +
                        "' (expected dirac_mixture, gaussian_mixture, sparse_gaussian, generative or perturbed)");
  }
  at_field(pointer, [&] { validate_prior(out); });
  return out;
}

Json prior_to_json(const PriorSpec& prior) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiracMixture>) {
          return dirac_json(p);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return Json{{"type", "gaussian_mixture"}, {"means", vectors_json(p.means)}, {"tau", p.tau}, {"weights", p.weights}};
        } else if constexpr (std::is_same_v<T, SparseGaussian>) {
          return Json{{"type", "sparse_gaussian"}, {"n", p.n}, {"s", p.s}};
        } else if constexpr (std::is_same_v<T, GenerativePushforward>) {
          Json j{{"type", "generative"}, {"latent_dim", p.latent_dim}, {"widths", p.widths}, {"weight_seed", p.weight_seed}};
          const auto regenerated = GenerativePushforward::from_seed(p.latent_dim, p.widths, p.weight_seed);
          if (!same_prior(PriorSpec{regenerated}, PriorSpec{p})) {
            Json layers = Json::array();
            for (const auto& w : p.layers) layers.push_back(matrix_json(w));
            j["layers"] = std::move(layers);
          }
          return j;
        } else {
          return Json{{"type", "perturbed"}, {"base", dirac_json(p.base)}, {"offsets", vectors_json(p.offsets)}, {"eps", p.eps}};
        }
      },
      prior);
}

ExperimentConfig config_from_json(const Json& j) {
  const Node root(j, "");
  root.expect_object({"schema", "real_prior", "model_prior", "operator", "sigma", "m_values", "threshold_factor",
                      "eta", "trials", "master_seed", "posterior", "bound"});
  const Node schema = root.at("schema");
  if (schema.integer() != 1) schema.fail("unsupported schema version (expected 1)");

  ExperimentConfig c;
  c.real_prior = prior_from_json(j.at("real_prior"), "/real_prior");
  if (root.has("model_prior")) c.model_prior = prior_from_json(j.at("model_prior"), "/model_prior");
  c.op = operator_from(root.at("operator"));
  c.sigma = root.at("sigma").number();
  const Node ms = root.at("m_values");
  for (std::size_t i = 0; i < ms.size(); ++i) c.m_values.push_back(ms.at(i).small_int());
  if (root.has("threshold_factor")) c.threshold_factor = root.at("threshold_factor").number();
  if (root.has("eta")) c.eta = root.at("eta").number();
  c.trials = root.at("trials").small_int();
  if (root.has("master_seed")) c.master_seed = root.at("master_seed").u64();
  if (root.has("posterior")) {
    const Node p = root.at("posterior");
    p.expect_object({"mode", "n_particles"});
    const std::string mode = p.at("mode").string();
    if (mode == "exact") {
      c.posterior_mode = PosteriorMode::exact;
      if (p.has("n_particles")) p.at("n_particles").fail("only valid with mode \"particles\"");
    } else if (mode == "particles") {
      c.posterior_mode = PosteriorMode::particles;
      if (p.has("n_particles")) c.n_particles = p.at("n_particles").small_int();
    } else {
      p.at("mode").fail("unknown posterior mode '" + mode + "' (expected exact or particles)");
    }
  }
  if (root.has("bound")) c.bound = bound_from(root.at("bound"));
  validate_config(c);
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["schema"] = 1;
  j["real_prior"] = prior_to_json(c.real_prior);
  if (c.model_prior) j["model_prior"] = prior_to_json(*c.model_prior);
  j["operator"] = operator_json(c.op);
  j["sigma"] = c.sigma;
  j["m_values"] = c.m_values;
  j["threshold_factor"] = c.threshold_factor;
  j["eta"] = c.eta;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  if (c.posterior_mode == PosteriorMode::exact)
    j["posterior"] = Json{{"mode", "exact"}};
  else
    j["posterior"] = Json{{"mode", "particles"}, {"n_particles", c.n_particles}};
  Json b{{"mode", std::string(bound_mode_name(c.bound.mode))},
         {"delta", c.bound.delta},
         {"c_prime", c.bound.c_prime},
         {"t", c.bound.t}};
  if (std::isinf(c.bound.p_order)) b["p_order"] = "inf";
  else b["p_order"] = c.bound.p_order;
  if (c.bound.eps) b["eps"] = *c.bound.eps;
  if (c.bound.log_cover) b["log_cover"] = *c.bound.log_cover;
  j["bound"] = std::move(b);
  return j;
}

bool configs_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (!same_prior(a.real_prior, b.real_prior)) return false;
  if (a.model_prior.has_value() != b.model_prior.has_value()) return false;
  if (a.model_prior && !same_prior(*a.model_prior, *b.model_prior)) return false;
  if (a.op.index() != b.op.index()) return false;
  if (const auto* g = std::get_if<SubgaussianSpec>(&a.op); g && g->kind != std::get<SubgaussianSpec>(b.op).kind)
    return false;
  if (const auto* s = std::get_if<SubsampledSpec>(&a.op); s && s->basis != std::get<SubsampledSpec>(b.op).basis)
    return false;
  const auto& ba = a.bound;
  const auto& bb = b.bound;
  return a.sigma == b.sigma && a.m_values == b.m_values && a.threshold_factor == b.threshold_factor &&
         a.eta == b.eta && a.trials == b.trials && a.master_seed == b.master_seed &&
         a.posterior_mode == b.posterior_mode &&
         (a.posterior_mode == PosteriorMode::exact || a.n_particles == b.n_particles) && ba.mode == bb.mode &&
         ba.delta == bb.delta && ba.c_prime == bb.c_prime && ba.t == bb.t && ba.p_order == bb.p_order &&
         ba.eps == bb.eps && ba.log_cover == bb.log_cover;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json breakdown_to_json(const BoundBreakdown& b) {
  return Json{{"term_2delta", b.term_2delta},
              {"term_c_abs", b.term_c_abs},
              {"term_d_upp_cprime", b.term_d_upp_cprime},
              {"term_shift_factor", b.term_shift_factor},
              {"term_exp_k", b.term_exp_k},
              {"term_c_low", b.term_c_low},
              {"term_c_upp", b.term_c_upp},
              {"term_d_upp_inner", b.term_d_upp_inner},
              {"total", b.total},
              {"total_clamped", b.total_clamped},
              {"threshold", b.threshold}};
}

Json report_to_json(const ExperimentReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row{{"m", r.m},
             {"trials", r.trials},
             {"failures", r.failures},
             {"p_hat", r.p_hat},
             {"wilson_low", r.wilson_low},
             {"wilson_high", r.wilson_high},
             {"bound_total", r.bound_total ? Json(*r.bound_total) : Json(nullptr)},
             {"threshold", r.threshold},
             {"mean_q", r.mean_q},
             {"resampled_draws", r.resampled_draws}};
    if (report.config.posterior_mode == PosteriorMode::particles)
      row["degenerate_posteriors"] = r.degenerate_posteriors;
    if (r.breakdown) row["breakdown"] = breakdown_to_json(*r.breakdown);
    rows.push_back(std::move(row));
  }
  return Json{{"schema", 1}, {"seed", report.seed}, {"config", config_to_json(report.config)}, {"rows", rows}};
}

std::string_view csv_header() {
  return "m,trials,failures,p_hat,wilson_low,wilson_high,bound_total,threshold,mean_q,seed";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out(csv_header());
  out += '\n';
  for (const auto& r : report.rows) {
    out += std::to_string(r.m) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.failures) + ',' +
           format_double(r.p_hat) + ',' + format_double(r.wilson_low) + ',' + format_double(r.wilson_high) + ',' +
           (r.bound_total ? format_double(*r.bound_total) : std::string()) + ',' + format_double(r.threshold) +
           ',' + format_double(r.mean_q) + ',' + std::to_string(report.seed) + '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace brl
