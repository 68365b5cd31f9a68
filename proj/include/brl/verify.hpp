#pragma once

#include "brl/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace brl {

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Multiplies every d_upp value the suites compare against. Only for
  /// negative-control testing; 1 in normal use.
  double d_upp_scale = 1.0;
};

struct VerifyCheck {
  std::string suite;
  std::string name;
  bool pass = false;
  Json detail;

  Json to_json() const;
};

/// gauss-noise, gaussian-conc, orthog-conc, separation, tv-sep, main-bound.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite, or every suite for "all". Throws brl::Error for an
/// unknown suite name.
std::vector<VerifyCheck> run_verify_suite(const std::string& suite, const VerifyOptions& options);

/// Upper end of the two-sided 99% Wilson interval.
double wilson99_upper(long long hits, long long trials);

}  // namespace brl
