#include "bullbear/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include "bullbear/error.hpp"

namespace bullbear {
namespace {

using std::abs;
using std::sqrt;
using boost::multiprecision::abs;
using boost::multiprecision::sqrt;

template <class R>
double as_double(const R& value) {
  return static_cast<double>(value);
}

template <class R>
double condition_estimate(const Matrix<R>& h0) {
  Eigen::FullPivLU<Matrix<R>> lu(h0);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  const Matrix<R> inverse = lu.inverse();
  const R norm = h0.cwiseAbs().colwise().sum().maxCoeff();
  const R inverse_norm = inverse.cwiseAbs().colwise().sum().maxCoeff();
  return as_double<R>(norm * inverse_norm);
}

template <class R>
std::vector<R> quadratic_roots(const Matrix<R>& h0, const Matrix<R>& h1, const FitOptions& options,
                               double& max_imaginary) {
  // det(H0 x - H1) = a x^2 + b x + c
  const R a = h0(0, 0) * h0(1, 1) - h0(0, 1) * h0(1, 0);
  const R b = -(h0(0, 0) * h1(1, 1) + h1(0, 0) * h0(1, 1)) + h0(0, 1) * h1(1, 0) + h1(0, 1) * h0(1, 0);
  const R c = h1(0, 0) * h1(1, 1) - h1(0, 1) * h1(1, 0);
  const R disc = b * b - 4 * a * c;
  if (disc < 0) {
    const R real = -b / (2 * a);
    const R imag = sqrt(-disc) / (2 * abs(a));
    max_imaginary = as_double<R>(imag);
    if (imag > options.realness_tolerance * (1 + abs(real))) {
      throw Error(Errc::complex_roots, "pencil eigenvalues are complex (|Im| = " + std::to_string(max_imaginary) + ")");
    }
    return {real, real};
  }
  max_imaginary = 0.0;
  const R root = sqrt(disc);
  const R q = b >= 0 ? R(-(b + root) / 2) : R(-(b - root) / 2);
  if (q == 0) return {R(0), R(0)};
  std::vector<R> roots{q / a, c / q};
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

template <class R>
CumulantVector<R> cumulants_from_moments(std::span<const R> moments) {
  if (moments.size() < 2 || moments.size() % 2 != 0) {
    throw Error(Errc::invalid_argument, "need an even number (>= 2) of raw moments, got " +
                                            std::to_string(moments.size()));
  }
  const std::size_t order = moments.size();
  // a_k = m_k / k!, b = log(1 + A) by n b_n = n a_n - sum_{k<n} k b_k a_{n-k}
  std::vector<R> a(order + 1, R(0));
  std::vector<R> b(order + 1, R(0));
  R factorial(1);
  for (std::size_t k = 1; k <= order; ++k) {
    factorial *= R(static_cast<double>(k));
    a[k] = moments[k - 1] / factorial;
  }
  CumulantVector<R> out;
  out.values.reserve(order);
  factorial = R(1);
  for (std::size_t n = 1; n <= order; ++n) {
    R convolution(0);
    for (std::size_t k = 1; k < n; ++k) convolution += R(static_cast<double>(k)) * b[k] * a[n - k];
    b[n] = a[n] - convolution / R(static_cast<double>(n));
    factorial *= R(static_cast<double>(n));
    out.values.push_back(factorial * b[n]);
  }
  return out;
}

template <class R>
HankelPencil<R> hankel_pencil(const CumulantVector<R>& cumulants) {
  if (cumulants.values.size() < 2 || cumulants.values.size() % 2 != 0) {
    throw Error(Errc::invalid_argument, "cumulant vector length must be even and >= 2");
  }
  const auto g = static_cast<Eigen::Index>(cumulants.groups());
  HankelPencil<R> pencil{Matrix<R>(g, g), Matrix<R>(g, g)};
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      pencil.h0(i, j) = cumulants.values[static_cast<std::size_t>(i + j)];
      pencil.h1(i, j) = cumulants.values[static_cast<std::size_t>(i + j + 1)];
    }
  }
  return pencil;
}

template <class R>
PencilRoots<R> pencil_roots(const HankelPencil<R>& pencil, const FitOptions& options) {
  const auto g = pencil.h0.rows();
  if (g == 0 || pencil.h0.cols() != g || pencil.h1.rows() != g || pencil.h1.cols() != g) {
    throw Error(Errc::invalid_argument, "pencil matrices must be square and of equal size");
  }
  PencilRoots<R> out;
  out.condition = condition_estimate<R>(pencil.h0);
  if (!(out.condition <= options.condition_bound)) {
    std::ostringstream msg;
    msg << "H0 condition estimate " << out.condition << " exceeds " << options.condition_bound;
    throw Error(Errc::singular_hankel, msg.str());
  }
  if (g == 1) {
    out.roots = {pencil.h1(0, 0) / pencil.h0(0, 0)};
  } else if (g == 2) {
    out.roots = quadratic_roots<R>(pencil.h0, pencil.h1, options, out.max_imaginary);
  } else {
    const Matrix<R> companion = pencil.h0.fullPivLu().solve(pencil.h1);
    Eigen::EigenSolver<Matrix<R>> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(Errc::complex_roots, "eigenvalue iteration did not converge");
    }
    const auto values = solver.eigenvalues();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const R real = values(i).real();
      const R imag = abs(values(i).imag());
      out.max_imaginary = std::max(out.max_imaginary, as_double<R>(imag));
      if (imag > options.realness_tolerance * (1 + abs(real))) {
        throw Error(Errc::complex_roots,
                    "pencil eigenvalue has |Im| = " + std::to_string(as_double<R>(imag)) + " beyond tolerance");
      }
      out.roots.push_back(real);
    }
    std::sort(out.roots.begin(), out.roots.end());
  }
  return out;
}

template <class R>
WeightSolution<R> solve_weights(std::span<const R> roots, const CumulantVector<R>& cumulants,
                                const FitOptions& options) {
  const std::size_t g = roots.size();
  if (g == 0 || cumulants.values.size() < g) {
    throw Error(Errc::invalid_argument, "need g roots and at least g cumulants");
  }
  // solve in ascending root order so any input permutation gives the same pairs
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return roots[x] < roots[y]; });
  for (std::size_t i = 0; i < g; ++i) {
    const R& r = roots[order[i]];
    if (!(abs(r) > options.zero_tolerance)) {
      throw Error(Errc::zero_root, "root " + std::to_string(as_double<R>(r)) + " is zero");
    }
    if (i > 0) {
      const R& prev = roots[order[i - 1]];
      if (!(abs(r - prev) > options.distinctness_tolerance * std::max(abs(r), abs(prev)))) {
        throw Error(Errc::distinctness_violated, "roots are not pairwise distinct");
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(g);
  Matrix<R> system(n, n);  // (V^T D)(i, h) = r_h^{i+1}
  Eigen::Matrix<R, Eigen::Dynamic, 1> rhs(n);
  for (Eigen::Index h = 0; h < n; ++h) {
    R power = roots[order[static_cast<std::size_t>(h)]];
    for (Eigen::Index i = 0; i < n; ++i) {
      system(i, h) = power;
      power *= roots[order[static_cast<std::size_t>(h)]];
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = cumulants.values[static_cast<std::size_t>(i)];
  const Eigen::Matrix<R, Eigen::Dynamic, 1> solution = system.fullPivLu().solve(rhs);
  WeightSolution<R> out;
  out.weights.assign(g, R(0));
  for (std::size_t i = 0; i < g; ++i) out.weights[order[i]] = solution(static_cast<Eigen::Index>(i));
  out.residual = as_double<R>((system * solution - rhs).norm());
  return out;
}

template CumulantVector<double> cumulants_from_moments<double>(std::span<const double>);
template CumulantVector<HighReal> cumulants_from_moments<HighReal>(std::span<const HighReal>);
template HankelPencil<double> hankel_pencil<double>(const CumulantVector<double>&);
template HankelPencil<HighReal> hankel_pencil<HighReal>(const CumulantVector<HighReal>&);
template PencilRoots<double> pencil_roots<double>(const HankelPencil<double>&, const FitOptions&);
template PencilRoots<HighReal> pencil_roots<HighReal>(const HankelPencil<HighReal>&, const FitOptions&);
template WeightSolution<double> solve_weights<double>(std::span<const double>, const CumulantVector<double>&,
                                                      const FitOptions&);
template WeightSolution<HighReal> solve_weights<HighReal>(std::span<const HighReal>, const CumulantVector<HighReal>&,
                                                          const FitOptions&);

bool ValidityReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.passed; });
}

std::string ValidityReport::failures() const {
  std::string out;
  for (const auto& check : checks) {
    if (check.passed) continue;
    if (!out.empty()) out += "; ";
    out += check.condition;
  }
  return out;
}

ValidityReport validate_fit(std::span<const double> roots, std::span<const double> weights,
                            const FitOptions& options) {
  ValidityReport report;
  {
    double margin = std::numeric_limits<double>::infinity();
    for (const double r : roots) {
      margin = std::min(margin, std::isfinite(r) ? std::abs(r) - options.zero_tolerance : -1.0);
    }
    report.checks.push_back({"roots real and nonzero", margin > 0.0, margin});
  }
  {
    std::vector<double> sorted(roots.begin(), roots.end());
    std::sort(sorted.begin(), sorted.end());
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      const double scale = std::max(std::abs(sorted[i]), std::abs(sorted[i - 1]));
      margin = std::min(margin, (sorted[i] - sorted[i - 1]) - options.distinctness_tolerance * scale);
    }
    report.checks.push_back({"roots pairwise distinct", margin > 0.0, margin});
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    for (const double w : weights) margin = std::min(margin, w);
    if (weights.size() != roots.size()) margin = -1.0;
    report.checks.push_back({"weights positive", margin > 0.0, margin});
  }
  return report;
}

MappedModel map_parameters(std::span<const double> roots, std::span<const double> weights, std::uint64_t anchor,
                           std::optional<std::uint64_t> total) {
  const auto report = validate_fit(roots, weights);
  if (!report.ok()) {
    throw Error(Errc::invalid_fit, "cannot map an invalid fit: " + report.failures());
  }
  // pair and sort by root so the anchor is the largest factor
  std::vector<std::size_t> order(roots.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return roots[x] < roots[y]; });
  const double top_weight = weights[order.back()];
  if (!(static_cast<double>(anchor) > top_weight)) {
    throw Error(Errc::anchor_too_small,
                "anchor count " + std::to_string(anchor) + " must exceed the top weight " + std::to_string(top_weight));
  }
  std::vector<GroupSpec> groups;
  std::uint64_t active = 0;
  for (const std::size_t h : order) {
    const double scaled = weights[h] / top_weight * static_cast<double>(anchor);
    const auto count = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(scaled)));
    groups.push_back({std::exp(roots[h]), count});
    active += count;
  }
  const std::uint64_t investors = total.value_or(active);
  if (investors < active) {
    throw Error(Errc::total_too_small, "total " + std::to_string(investors) + " is below the mapped group sum " +
                                           std::to_string(active));
  }
  const double horizon =
      -static_cast<double>(investors) * std::log1p(-top_weight / static_cast<double>(anchor));
  return {ModelParams(std::move(groups), investors), horizon};
}

HighReal to_high_real(const ExactRational& value) {
  return HighReal(value.numerator().get_str()) / HighReal(value.denominator().get_str());
}

namespace {

FitResult fit_high(std::span<const HighReal> moments, unsigned groups, std::uint64_t anchor,
                   std::optional<std::uint64_t> total, const FitOptions& options) {
  if (groups == 0 || moments.size() != 2 * static_cast<std::size_t>(groups)) {
    throw Error(Errc::invalid_argument, "fitting " + std::to_string(groups) + " groups needs exactly " +
                                            std::to_string(2 * groups) + " moments, got " +
                                            std::to_string(moments.size()));
  }
  const auto cumulants = cumulants_from_moments<HighReal>(moments);
  const auto pencil = hankel_pencil(cumulants);
  const auto roots = pencil_roots(pencil, options);

  FitResult result{{}, {}, ModelParams({}, 1), 0.0, {}};
  result.diagnostics.condition = roots.condition;
  result.diagnostics.max_imaginary = roots.max_imaginary;
  for (const auto& r : roots.roots) result.roots.push_back(static_cast<double>(r));

  // root conditions first: solving for weights needs distinct nonzero roots
  auto root_report = validate_fit(result.roots, std::vector<double>(result.roots.size(), 1.0), options);
  root_report.checks.pop_back();
  if (!root_report.ok()) {
    result.diagnostics.validity = root_report;
    throw Error(Errc::invalid_fit, "moments are not reachable: " + root_report.failures());
  }
  const auto weights = solve_weights<HighReal>(roots.roots, cumulants, options);
  for (const auto& w : weights.weights) result.weights.push_back(static_cast<double>(w));
  result.diagnostics.residual = weights.residual;
  result.diagnostics.validity = validate_fit(result.roots, result.weights, options);
  if (!result.diagnostics.validity.ok()) {
    throw Error(Errc::invalid_fit, "moments are not reachable: " + result.diagnostics.validity.failures());
  }
  auto mapped = map_parameters(result.roots, result.weights, anchor, total);
  result.mapped_params = std::move(mapped.params);
  result.mapped_horizon = mapped.horizon;
  return result;
}

}  // namespace

FitResult fit(std::span<const double> moments, unsigned groups, std::uint64_t anchor,
              std::optional<std::uint64_t> total, const FitOptions& options) {
  std::vector<HighReal> high(moments.begin(), moments.end());
  return fit_high(high, groups, anchor, total, options);
}

FitResult fit(std::span<const ExactRational> moments, unsigned groups, std::uint64_t anchor,
              std::optional<std::uint64_t> total, const FitOptions& options) {
  std::vector<HighReal> high;
  high.reserve(moments.size());
  for (const auto& m : moments) high.push_back(to_high_real(m));
  return fit_high(high, groups, anchor, total, options);
}

}  // namespace bullbear
