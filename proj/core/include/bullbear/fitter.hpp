#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bullbear/model.hpp"
#include "bullbear/rational.hpp"

// Moment fitting: raw moments m_1..m_2g -> cumulants -> Hankel pencil ->
// log factors r_h (pencil eigenvalues) and Poisson weights lambda_h ->
// model parameters whose moments approach the targets as the anchor group
// grows.

namespace bullbear {

/// 50 significant decimal digits; the precision fit() works in.
using HighReal =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

template <class R>
using Matrix = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;

struct FitOptions {
  /// Reject H0 whose 1-norm condition estimate exceeds this.
  double condition_bound = 1e12;
  /// Accept an eigenvalue as real when |Im| <= tol * (1 + |lambda|).
  double realness_tolerance = 1e-9;
  /// Roots are distinct when |r_i - r_j| > tol * max(|r_i|, |r_j|).
  double distinctness_tolerance = 1e-9;
  /// Roots with |r| <= this count as zero.
  double zero_tolerance = 1e-12;
};

/// kappa_1..kappa_2g.
template <class R>
struct CumulantVector {
  std::vector<R> values;

  unsigned groups() const { return static_cast<unsigned>(values.size() / 2); }
};

template <class R>
struct HankelPencil {
  Matrix<R> h0;  // h0(i, j) = kappa_{i+j+1}
  Matrix<R> h1;  // h1(i, j) = kappa_{i+j+2}
};

template <class R>
struct PencilRoots {
  std::vector<R> roots;  // ascending
  double condition = 0.0;
  double max_imaginary = 0.0;
};

template <class R>
struct WeightSolution {
  std::vector<R> weights;  // same order as the roots passed in
  double residual = 0.0;   // || V^T D lambda - kappa_{1..g} ||_2
};

/// kappa_n = n! [x^n] log(1 + sum_k m_k x^k / k!). Needs an even count >= 2.
template <class R>
CumulantVector<R> cumulants_from_moments(std::span<const R> moments);

template <class R>
HankelPencil<R> hankel_pencil(const CumulantVector<R>& cumulants);

/// Eigenvalues of H0^{-1} H1 (closed-form quadratic for g <= 2).
/// Throws singular_hankel or complex_roots.
template <class R>
PencilRoots<R> pencil_roots(const HankelPencil<R>& pencil, const FitOptions& options = {});

/// Solves V^T D lambda = (kappa_1..kappa_g). Throws distinctness_violated or zero_root.
template <class R>
WeightSolution<R> solve_weights(std::span<const R> roots, const CumulantVector<R>& cumulants,
                                const FitOptions& options = {});

struct ConditionCheck {
  std::string condition;
  bool passed = false;
  double margin = 0.0;  // signed distance to the threshold; negative on failure
};

struct ValidityReport {
  std::vector<ConditionCheck> checks;

  bool ok() const;
  std::string failures() const;
};

/// Checks roots nonzero, roots pairwise distinct, and weights positive.
ValidityReport validate_fit(std::span<const double> roots, std::span<const double> weights,
                            const FitOptions& options = {});

struct MappedModel {
  ModelParams params;
  double horizon = 0.0;
};

/// N_i(0) = round((lambda_i / lambda_g) * anchor), f_h = exp(r_h),
/// N = total or sum N_i(0), t = -N log(1 - lambda_g / anchor).
MappedModel map_parameters(std::span<const double> roots, std::span<const double> weights, std::uint64_t anchor,
                           std::optional<std::uint64_t> total = std::nullopt);

struct FitDiagnostics {
  double condition = 0.0;
  double residual = 0.0;
  double max_imaginary = 0.0;
  ValidityReport validity;
};

struct FitResult {
  std::vector<double> roots;    // ascending
  std::vector<double> weights;  // paired with roots
  ModelParams mapped_params;
  double mapped_horizon = 0.0;
  FitDiagnostics diagnostics;
};

/// Full pipeline in HighReal precision. Validity failures throw invalid_fit.
FitResult fit(std::span<const double> moments, unsigned groups, std::uint64_t anchor,
              std::optional<std::uint64_t> total = std::nullopt, const FitOptions& options = {});
FitResult fit(std::span<const ExactRational> moments, unsigned groups, std::uint64_t anchor,
              std::optional<std::uint64_t> total = std::nullopt, const FitOptions& options = {});

HighReal to_high_real(const ExactRational& value);

}  // namespace bullbear
