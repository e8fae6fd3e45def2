#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "tou/rng.hpp"

namespace tou {

enum class Suite { T1, T2, T3, T4, All };

const char* to_string(Suite suite) noexcept;
Suite suite_from_string(const std::string& name);

/// Monte Carlo sizes for the validation suites.
struct ValidationBudget {
  std::size_t t1_samples = 300000;
  std::size_t t2_constructions = 1000;
  std::size_t t2_pairs = 2000;
  std::size_t t3_replications = 500;
  std::size_t t3_length = 10000;
  std::size_t t3_terms = 200;
  std::size_t t3_qmc_points = 1 << 14;
  std::size_t t4_replications = 10000;
  std::size_t t4_length = 1001;

  /// Throws Error(InvalidParameter) when a size is zero or above its cap.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static ValidationBudget from_json(const nlohmann::json& j);
};

/// One check: `statistic` is compared with `target`; `tolerance` is the
/// allowed absolute deviation unless lower/upper bounds are given.
struct Check {
  std::string suite;
  std::string name;
  double statistic = 0.0;
  double target = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  [[nodiscard]] bool all_pass() const noexcept;
};

nlohmann::json to_json(const ValidationReport& report);

/// Tail indices: closed forms, Hill on i.i.d. transformed normals (both
/// tails) and on transformed correlated differences.
std::vector<Check> check_theorem1(const ValidationBudget& budget, RngSeed seed);
/// Spearman shift under sparse perturbations never exceeds the bound plus
/// five sampling standard errors.
std::vector<Check> check_theorem2(const ValidationBudget& budget, RngSeed seed);
/// Mean and variance of the known-median sign estimator on exact OU paths.
std::vector<Check> check_theorem3(const ValidationBudget& budget, RngSeed seed);
/// Small-sample moments of the sign fractions for i.i.d. normals.
std::vector<Check> check_theorem4(const ValidationBudget& budget, RngSeed seed);

ValidationReport validate_theorems(Suite suite, const ValidationBudget& budget, RngSeed seed);

}  // namespace tou
