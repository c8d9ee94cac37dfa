#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfblur/gabor.h"

namespace tfblur {

// One measured quantity with its acceptance bound.
struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool at_least = false;  // pass iff value >= tolerance (else value <= tolerance)
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  // Replaces the bound of every upper-bounded check when set.
  std::optional<double> tolerance_override;
};

const std::vector<std::string>& VerifySuiteNames();

// Runs one named suite; throws kInvalidArgument for unknown names.
std::vector<CheckResult> RunVerifySuite(const std::string& suite, const VerifyOptions& options);

// "suite name value tolerance PASS|FAIL"
std::string FormatCheck(const CheckResult& r);

// Random window pair (phi1, phi2) of length W whose product conj(phi1) phi2
// has a constant a-periodization, the condition under which the lattice
// Moyal identity with constant M/a holds exactly.
std::pair<Window, Window> RandomCompatiblePair(std::size_t window_len, std::size_t hop,
                                               std::uint64_t seed);
}  // namespace tfblur
