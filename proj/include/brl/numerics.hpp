#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace brl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Selects between the OpenMP kernel and the serial reference path.
/// Both paths produce bit-identical results.
enum class Exec { serial, parallel };

/// Counter-based random stream (Philox4x32-10).
///
/// The triple (master_seed, stream_id, counter) fully determines the next
/// output, so a stream can be re-created anywhere (another thread, another
/// run) and produce the same values. Each draw consumes one counter step.
struct RandomStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t counter = 0;

  /// Raw 128-bit Philox block at the current counter; advances the counter.
  std::array<std::uint32_t, 4> next_block();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double next_uniform();
  /// Standard normal via Box-Muller on a single block.
  double next_normal();
  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

  bool operator==(const RandomStream&) const = default;
};

/// Philox4x32-10 bijection, exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// Hashes a list of coordinates (trial index, role, ...) into a stream id.
std::uint64_t mix_stream_id(std::initializer_list<std::uint64_t> coords);

/// Stream at counter 0 for the given seed and coordinates.
RandomStream derive_stream(std::uint64_t master_seed,
                           std::initializer_list<std::uint64_t> coords);

// Special functions.

double std_normal_cdf(double x);
/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x), accurate in the far tail.
double regularized_gamma_q(double a, double x);
/// P(X <= x) for X ~ chi^2 with `dof` degrees of freedom.
double chi_square_cdf(double x, int dof);
/// P(X > x) for X ~ chi^2 with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);

double log_sum_exp(std::span<const double> values);

// Orthonormal transforms.

bool is_power_of_two(std::size_t n);

/// Orthonormal Walsh-Hadamard transform in natural (Sylvester) order.
void fwht_ortho_inplace(std::span<double> v);
Vector fwht_ortho(const Vector& v);

/// Orthonormal DCT-II and its inverse (DCT-III), O(n log n) through FFTW.
Vector dct_ortho(const Vector& v);
Vector idct_ortho(const Vector& v);

/// Direct O(n^2) evaluation of the same transforms; kept as the reference.
Vector dct_ortho_reference(const Vector& v);
Vector idct_ortho_reference(const Vector& v);

// Random draws.

Vector draw_gaussian(RandomStream& stream, Eigen::Index n);
Vector draw_rademacher(RandomStream& stream, Eigen::Index n);

/// Largest singular value by power iteration on M^T M.
/// Throws if the Rayleigh quotient has not settled to `rel_tol` after
/// `max_iter` iterations.
double spectral_norm(const Matrix& m, double rel_tol = 1e-6,
                     int max_iter = 10000);

}  // namespace brl
