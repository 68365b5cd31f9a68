#include "brl/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace brl {

std::string_view to_string(Basis basis) {
  switch (basis) {
    case Basis::identity: return "identity";
    case Basis::hadamard: return "hadamard";
    case Basis::dct: return "dct";
  }
  return "identity";
}

Basis parse_basis(std::string_view name) {
  if (name == "identity") return Basis::identity;
  if (name == "hadamard") return Basis::hadamard;
  if (name == "dct") return Basis::dct;
  throw Error("unknown basis '" + std::string(name) + "' (expected identity, hadamard or dct)");
}

void check_basis_dimension(Basis basis, int n) {
  if (n < 1) throw Error("basis dimension must be positive");
  if (basis == Basis::hadamard && !is_power_of_two(static_cast<std::size_t>(n)))
    throw Error("hadamard basis requires n to be a power of two, got " + std::to_string(n));
}

Vector apply_basis(Basis basis, const Vector& x) {
  switch (basis) {
    case Basis::identity: return x;
    case Basis::hadamard: return fwht_ortho(x);
    case Basis::dct: return dct_ortho(x);
  }
  return x;
}

Vector apply_basis_transpose(Basis basis, const Vector& x) {
  switch (basis) {
    case Basis::identity: return x;
    case Basis::hadamard: return fwht_ortho(x);
    case Basis::dct: return idct_ortho(x);
  }
  return x;
}

Matrix basis_matrix(Basis basis, int n) {
  check_basis_dimension(basis, n);
  const double dn = static_cast<double>(n);
  Matrix u(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      switch (basis) {
        case Basis::identity: u(i, j) = i == j ? 1.0 : 0.0; break;
        case Basis::hadamard:
          u(i, j) = (std::popcount(static_cast<unsigned>(i & j)) % 2 ? -1.0 : 1.0) / std::sqrt(dn);
          break;
        case Basis::dct: {
          const double alpha = i == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
          u(i, j) = alpha * std::cos(std::numbers::pi * (2.0 * j + 1.0) * i / (2.0 * dn));
          break;
        }
      }
    }
  }
  return u;
}

DrawnOperator DrawnOperator::dense(Matrix a, int m_nominal) {
  DrawnOperator op;
  op.n_ = static_cast<int>(a.cols());
  op.q_ = static_cast<int>(a.rows());
  op.m_nominal_ = m_nominal;
  op.rep_ = std::move(a);
  return op;
}

DrawnOperator DrawnOperator::subsampled(Basis basis, std::vector<int> rows, int m_nominal, int n) {
  check_basis_dimension(basis, n);
  if (m_nominal < 1 || m_nominal > n) throw Error("subsampled operator: need 1 <= m <= n");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= n || (i > 0 && rows[i] <= rows[i - 1]))
      throw Error("subsampled operator: rows must be strictly increasing indices in [0, n)");
  }
  DrawnOperator op;
  op.n_ = n;
  op.q_ = static_cast<int>(rows.size());
  op.m_nominal_ = m_nominal;
  op.rep_ = Subsampled{basis, std::move(rows), std::sqrt(static_cast<double>(n) / m_nominal)};
  return op;
}

Vector DrawnOperator::apply(const Vector& x) const {
  if (x.size() != n_)
    throw Error("apply: expected dimension " + std::to_string(n_) + ", got " +
                std::to_string(x.size()));
  if (const auto* a = std::get_if<Matrix>(&rep_)) return *a * x;
  const auto& s = std::get<Subsampled>(rep_);
  const Vector ux = apply_basis(s.basis, x);
  Vector y(static_cast<Eigen::Index>(s.rows.size()));
  for (std::size_t i = 0; i < s.rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = s.scale * ux[s.rows[i]];
  return y;
}

Vector DrawnOperator::apply_transpose(const Vector& y) const {
  if (y.size() != q_)
    throw Error("apply_transpose: expected dimension " + std::to_string(q_) + ", got " +
                std::to_string(y.size()));
  if (const auto* a = std::get_if<Matrix>(&rep_)) return a->transpose() * y;
  const auto& s = std::get<Subsampled>(rep_);
  Vector z = Vector::Zero(n_);
  for (std::size_t i = 0; i < s.rows.size(); ++i) z[s.rows[i]] = s.scale * y[static_cast<Eigen::Index>(i)];
  return apply_basis_transpose(s.basis, z);
}

Matrix DrawnOperator::to_dense() const {
  if (const auto* a = std::get_if<Matrix>(&rep_)) return *a;
  const auto& s = std::get<Subsampled>(rep_);
  const Matrix u = basis_matrix(s.basis, n_);
  Matrix out(q_, n_);
  for (std::size_t i = 0; i < s.rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = s.scale * u.row(s.rows[i]);
  return out;
}

DrawnOperator draw_operator(const OperatorSpec& spec, int m, int n, RandomStream& stream) {
  if (m < 1 || n < 1) throw Error("draw_operator: m and n must be positive");
  if (const auto* g = std::get_if<SubgaussianSpec>(&spec)) {
    Matrix a(m, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const double v = g->kind == SubgaussianKind::gaussian
                             ? stream.next_normal()
                             : ((stream.next_u64() >> 63) ? 1.0 : -1.0);
        a(i, j) = scale * v;
      }
    }
    return DrawnOperator::dense(std::move(a), m);
  }
  const auto& s = std::get<SubsampledSpec>(spec);
  check_basis_dimension(s.basis, n);
  if (m > n)
    throw Error("draw_operator: subsampled operators need m <= n (m = " + std::to_string(m) +
                ", n = " + std::to_string(n) + ")");
  const double keep = static_cast<double>(m) / n;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (stream.next_uniform() < keep) rows.push_back(i);
    if (!rows.empty()) {
      auto op = DrawnOperator::subsampled(s.basis, std::move(rows), m, n);
      op.set_resamples(attempt);
      return op;
    }
  }
  throw Error("draw_operator: two consecutive empty row selections (m/n too small)");
}

double op_norm_bound(const DrawnOperator& op) {
  if (const auto* s = op.subsampled_rows()) return s->scale;
  return spectral_norm(*op.dense_matrix(), 1e-6, 10000);
}

double mu_star(Basis basis, int n) {
  const Matrix u = basis_matrix(basis, n);
  return n * u.array().square().maxCoeff();
}

double coherence_sparse(Basis basis, int n, int s) {
  if (s < 1 || 2 * s > n)
    throw Error("coherence_sparse: need 1 <= s and 2s <= n (s = " + std::to_string(s) +
                ", n = " + std::to_string(n) + ")");
  const Matrix u = basis_matrix(basis, n);
  const auto top = static_cast<std::size_t>(2 * s);
  double best = 0.0;
  std::vector<double> sq(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sq[static_cast<std::size_t>(j)] = u(i, j) * u(i, j);
    std::partial_sort(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(top), sq.end(),
                      std::greater<>());
    double energy = 0.0;
    for (std::size_t k = 0; k < top; ++k) energy += sq[k];
    best = std::max(best, energy);
  }
  return n * best;
}

double coherence_of_directions(Basis basis, const std::vector<Vector>& directions) {
  double best = -1.0;
  Eigen::Index n = 0;
  for (const auto& d : directions) {
    const double norm = d.norm();
    if (norm < 1e-12) continue;
    n = d.size();
    const Vector ud = apply_basis(basis, d);
    best = std::max(best, ud.array().square().maxCoeff() / (norm * norm));
  }
  if (best < 0.0) throw Error("coherence: every direction is degenerate (norm < 1e-12)");
  return static_cast<double>(n) * best;
}

double coherence_empirical(Basis basis, int n, const PriorSpec& prior, int n_pairs,
                           RandomStream& stream) {
  if (n_pairs < 1) throw Error("coherence_empirical: n_pairs must be positive");
  check_basis_dimension(basis, n);
  if (prior_dimension(prior) != n) throw Error("coherence_empirical: prior dimension mismatch");
  std::vector<Vector> directions;
  directions.reserve(static_cast<std::size_t>(n_pairs));
  for (int i = 0; i < n_pairs; ++i) {
    const Vector a = sample_prior(prior, stream);
    const Vector b = sample_prior(prior, stream);
    directions.push_back(a - b);
  }
  return coherence_of_directions(basis, directions);
}

std::vector<Vector> difference_set(const std::vector<Vector>& from, const std::vector<Vector>& to,
                                   double radius) {
  std::vector<Vector> out;
  for (const auto& r : from) {
    for (const auto& p : to) {
      Vector d = r - p;
      const double norm = d.norm();
      if (norm >= 1e-12 && norm <= radius) out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace brl
