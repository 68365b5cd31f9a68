#include "brl/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace brl {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double to_open_unit(std::uint64_t bits) {
  // 53 random bits, shifted by half an ulp so 0 and 1 are never produced.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> RandomStream::next_block() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed),
                                            static_cast<std::uint32_t>(master_seed >> 32)};
  ++counter;
  return philox4x32_10(ctr, key);
}

std::uint64_t RandomStream::next_u64() {
  const auto b = next_block();
  return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

double RandomStream::next_uniform() { return to_open_unit(next_u64()); }

double RandomStream::next_normal() {
  const auto b = next_block();
  const double u1 = to_open_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
  const double u2 = to_open_unit((static_cast<std::uint64_t>(b[3]) << 32) | b[2]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw Error("next_below: bound must be positive");
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

std::uint64_t mix_stream_id(std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = 0x6A09E667F3BCC908ull;
  for (const auto c : coords) h = splitmix64(h ^ splitmix64(c));
  return h;
}

RandomStream derive_stream(std::uint64_t master_seed,
                           std::initializer_list<std::uint64_t> coords) {
  return RandomStream{master_seed, mix_stream_id(coords), 0};
}

// ---------------------------------------------------------------------------
// Special functions

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

double log_gamma(double a) {
  int sign = 0;
  return ::lgamma_r(a, &sign);
}

// Series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < 100000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw Error("regularized_gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw Error("regularized_gamma_q: shape must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_cdf(double x, int dof) {
  if (dof <= 0) throw Error("chi_square_cdf: degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_sf(double x, int dof) {
  if (dof <= 0) throw Error("chi_square_sf: degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (const double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// ---------------------------------------------------------------------------
// Transforms

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fwht_ortho_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n)) throw Error("fwht_ortho: dimension must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& x : v) x *= scale;
}

Vector fwht_ortho(const Vector& v) {
  Vector out = v;
  fwht_ortho_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

namespace {

struct DctPlans {
  fftw_plan forward = nullptr;  // REDFT10
  fftw_plan inverse = nullptr;  // REDFT01
};

// FFTW planning is not thread-safe; execution with new arrays is.
const DctPlans& dct_plans(int n) {
  static std::mutex mutex;
  static std::map<int, DctPlans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  double* out = fftw_alloc_real(static_cast<std::size_t>(n));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
  DctPlans plans;
  plans.forward = fftw_plan_r2r_1d(n, in, out, FFTW_REDFT10, flags);
  plans.inverse = fftw_plan_r2r_1d(n, in, out, FFTW_REDFT01, flags);
  fftw_free(in);
  fftw_free(out);
  if (plans.forward == nullptr || plans.inverse == nullptr) throw Error("dct: FFTW planning failed");
  return cache.emplace(n, plans).first->second;
}

}  // namespace

Vector dct_ortho(const Vector& v) {
  const auto n = v.size();
  if (n < 1) throw Error("dct_ortho: empty input");
  Vector out(n);
  fftw_execute_r2r(dct_plans(static_cast<int>(n)).forward, const_cast<double*>(v.data()),
                   out.data());
  const double dn = static_cast<double>(n);
  out[0] *= 0.5 * std::sqrt(1.0 / dn);
  out.tail(n - 1) *= 0.5 * std::sqrt(2.0 / dn);
  return out;
}

Vector idct_ortho(const Vector& v) {
  const auto n = v.size();
  if (n < 1) throw Error("idct_ortho: empty input");
  const double dn = static_cast<double>(n);
  Vector scaled = v;
  scaled[0] *= std::sqrt(1.0 / dn);
  scaled.tail(n - 1) *= 0.5 * std::sqrt(2.0 / dn);
  Vector out(n);
  fftw_execute_r2r(dct_plans(static_cast<int>(n)).inverse, scaled.data(), out.data());
  return out;
}

Vector dct_ortho_reference(const Vector& v) {
  const auto n = v.size();
  const double dn = static_cast<double>(n);
  Vector out = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += v[j] * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * dn));
    out[k] = alpha * acc;
  }
  return out;
}

Vector idct_ortho_reference(const Vector& v) {
  const auto n = v.size();
  const double dn = static_cast<double>(n);
  Vector out = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double alpha = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
      acc += alpha * v[k] * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * dn));
    }
    out[j] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Draws

Vector draw_gaussian(RandomStream& stream, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = stream.next_normal();
  return v;
}

Vector draw_rademacher(RandomStream& stream, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (stream.next_u64() >> 63) ? 1.0 : -1.0;
  return v;
}

double spectral_norm(const Matrix& m, double rel_tol, int max_iter) {
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;
  RandomStream start{0x5eed5eedull, 0, 0};
  Vector v = draw_gaussian(start, m.cols());
  v.normalize();
  for (int it = 0; it < max_iter; ++it) {
    const Vector u = m.transpose() * (m * v);
    const double lambda = v.dot(u);
    // Residual bound: lambda is within ||u - lambda v|| of an eigenvalue of M^T M.
    const double residual = (u - lambda * v).norm();
    if (residual <= rel_tol * lambda) return std::sqrt(lambda);
    const double un = u.norm();
    if (un == 0.0) return 0.0;
    v = u / un;
  }
  throw Error("spectral_norm: power iteration did not converge in " +
              std::to_string(max_iter) + " iterations");
}

}  // namespace brl
