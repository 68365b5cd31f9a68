#pragma once

#include "brl/numerics.hpp"
#include "brl/priors.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace brl {

enum class SubgaussianKind { gaussian, rademacher };
enum class Basis { identity, hadamard, dct };

std::string_view to_string(Basis basis);
Basis parse_basis(std::string_view name);

/// Dense matrix (1/sqrt(m)) * A~ with i.i.d. unit-variance entries.
struct SubgaussianSpec {
  SubgaussianKind kind = SubgaussianKind::gaussian;
};

/// Rows of an orthogonal basis kept independently with probability m/n,
/// scaled by sqrt(n/m).
struct SubsampledSpec {
  Basis basis = Basis::identity;
};

using OperatorSpec = std::variant<SubgaussianSpec, SubsampledSpec>;

/// Applies the orthonormal basis U to x (U x).
Vector apply_basis(Basis basis, const Vector& x);
/// Applies U^T to x.
Vector apply_basis_transpose(Basis basis, const Vector& x);
/// Materialized n x n matrix U (row i is u_i^T).
Matrix basis_matrix(Basis basis, int n);
void check_basis_dimension(Basis basis, int n);

/// A realized forward operator.
class DrawnOperator {
 public:
  struct Subsampled {
    Basis basis;
    std::vector<int> rows;  // strictly increasing
    double scale;           // sqrt(n / m)
  };

  static DrawnOperator dense(Matrix a, int m_nominal);
  static DrawnOperator subsampled(Basis basis, std::vector<int> rows, int m_nominal, int n);

  int n() const { return n_; }
  int m_nominal() const { return m_nominal_; }
  /// Actual number of rows.
  int q() const { return q_; }
  /// Number of empty row draws that were discarded before this one.
  int resamples() const { return resamples_; }
  void set_resamples(int r) { resamples_ = r; }

  bool is_dense() const { return std::holds_alternative<Matrix>(rep_); }
  const Matrix* dense_matrix() const { return std::get_if<Matrix>(&rep_); }
  const Subsampled* subsampled_rows() const { return std::get_if<Subsampled>(&rep_); }

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;
  /// Explicit q x n matrix.
  Matrix to_dense() const;

 private:
  std::variant<Matrix, Subsampled> rep_;
  int n_ = 0;
  int m_nominal_ = 0;
  int q_ = 0;
  int resamples_ = 0;
};

/// Draws A ~ spec. For subsampled operators an empty row set is redrawn once;
/// a second empty draw throws.
DrawnOperator draw_operator(const OperatorSpec& spec, int m, int n, RandomStream& stream);

/// sqrt(n/m) for subsampled operators, power-iteration ||A|| for dense ones.
double op_norm_bound(const DrawnOperator& op);

/// n * max_ij u_ij^2.
double mu_star(Basis basis, int n);

/// Exact coherence relative to the (2s)-sparse vectors: for every row, the
/// sup over supports |S| <= 2s of |<u_i, x>|^2 / ||x||^2 is the energy of the
/// 2s largest squared entries of u_i.
double coherence_sparse(Basis basis, int n, int s);

/// n * max ||U d||_inf^2 / ||d||^2 over the supplied nonzero directions.
/// Directions with norm below 1e-12 are skipped; throws if none remain.
double coherence_of_directions(Basis basis, const std::vector<Vector>& directions);

/// Coherence over differences of sampled prior pairs. This is a lower
/// estimate of the coherence over supp(P) - supp(P).
double coherence_empirical(Basis basis, int n, const PriorSpec& prior, int n_pairs,
                           RandomStream& stream);

/// All nonzero differences r - p for r in `from`, p in `to` with ||r - p|| <= radius.
std::vector<Vector> difference_set(const std::vector<Vector>& from, const std::vector<Vector>& to,
                                   double radius);

}  // namespace brl
