#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tou/rng.hpp"

namespace tou {

using Pair = std::pair<double, double>;

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> midranks(std::span<const double> x);

/// Integer ranks of a tie-free sample; each sequence is a permutation of 1..n.
struct RankedPairs {
  std::vector<std::size_t> u_ranks;
  std::vector<std::size_t> v_ranks;
};

/// Throws Error(InvalidParameter) if either coordinate has ties.
RankedPairs rank_pairs(std::span<const Pair> pairs);

/// 12 / (n (n² - 1)) · Σ (rank(U_j) - (n+1)/2)(rank(V_j) - (n+1)/2), with
/// midranks for ties. Throws Error(InsufficientData) for n < 2 and
/// Error(UndefinedCorrelation) when a coordinate is constant.
double spearman_rho(std::span<const Pair> pairs);
double spearman_rho(std::span<const double> u, std::span<const double> v);
/// Exact integer evaluation on permutation ranks.
double spearman_rho(const RankedPairs& ranks);

/// (6/π) asin(rho / 2): Spearman's rho of a Gauss copula with parameter rho.
double spearman_from_rho(double rho);
/// 2 sin(π rho_s / 6), the inverse of spearman_from_rho.
double rho_from_spearman(double rho_s);

/// (Φ(Z1), Φ(Z2)) for standard bivariate normal (Z1, Z2) with correlation rho.
/// Throws Error(DegenerateCopula) for |rho| >= 1.
std::vector<Pair> gauss_copula_sample(double rho, std::size_t n, RngSeed seed);

/// Componentwise midranks divided by n + 1.
std::vector<Pair> pseudo_observations(std::span<const Pair> pairs);

/// C_rho(u, v) = Φ₂(Φ⁻¹(u), Φ⁻¹(v); rho), with the boundary limits at 0 and 1.
double gauss_copula_cdf(double rho, double u, double v);

/// Empirical copula C_n(u, v) = (1/n) #{i : u_i <= u, v_i <= v} of the
/// pseudo-observations, evaluated at each pseudo-observation.
std::vector<double> empirical_copula_at_points(std::span<const Pair> pseudo);

struct CopulaFit {
  double rho = 0.0;
  double rho_s_hat = 0.0;
  double gof_statistic = 0.0;
  double p_value = 0.0;
  std::size_t n_bootstrap = 0;
  std::size_t n = 0;
  RngSeed seed;
};

nlohmann::json to_json(const CopulaFit& fit);

/// Cramér–von Mises statistic Σ_j (C_n(û_j) - C_rho(û_j))² on the pseudo-observations.
double cramer_von_mises(std::span<const Pair> pseudo, double rho);

/// Gauss copula goodness of fit: rho from Spearman inversion, Cramér–von
/// Mises statistic, parametric-bootstrap p-value (replicate b uses
/// seed.substream(b)). Requires n >= 20 and n_bootstrap >= 100.
CopulaFit gauss_copula_gof(std::span<const Pair> pairs, std::size_t n_bootstrap, RngSeed seed);

/// 18 (eps1 + eps2) + 12 eps1 eps2: bound on the change of Spearman's rho
/// when U and V are perturbed with probabilities eps1 and eps2.
double spearman_perturbation_bound(double eps1, double eps2);

}  // namespace tou
