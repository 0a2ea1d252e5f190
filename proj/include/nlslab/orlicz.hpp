#pragma once

// Young functions Phi(x) = exp(-x^{-alpha} + C x^beta), Luxemburg norms and
// convex conjugates.
//
// Phi is evaluated through g(x) = log Phi(x) wherever values can leave the
// double range; exp(g) is only formed when the result is representable.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nlslab/spectral.hpp"

namespace nlslab {

struct ConvexityScan {
  bool convex = true;
  double lower = 0, upper = 0;
  double worst_violation = 0;  // max of log(left slope) - log(right slope)
  double worst_at = 0;
};

class YoungFunction {
 public:
  YoungFunction(double alpha, double beta, double C, double x_max = 10.0);

  /// Standard instances for a given gamma: Phi (level 0), Phi-bar (1), Phi_3 (2):
  /// alpha = 1 / (2^level gamma), beta = 2^{-level}. C is chosen by scanning.
  /// With convex_sqrt, C is chosen so that Phi(sqrt t) is convex instead.
  static YoungFunction standard_instance(double gamma, int level, double x_max = 10.0, bool convex_sqrt = false);
  /// Smallest scanned C making Phi(sqrt t) convex on [0, x_max^2].
  static YoungFunction with_convex_sqrt(double alpha, double beta, double x_max = 10.0);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double C() const { return C_; }
  double x_max() const { return x_max_; }

  /// Phi(x); exactly 0 once x^{-alpha} exceeds 700.
  double operator()(double x) const;
  /// log Phi(x) = -x^{-alpha} + C x^beta, -inf at 0.
  double log_value(double x) const;
  /// log Phi'(x) = log Phi(x) + log g'(x), g' = alpha x^{-alpha-1} + C beta x^{beta-1}.
  double log_derivative(double x) const;
  /// log g'(x) in overflow-free form.
  double log_g_prime(double x) const;

  /// Solves log Phi(x) = level for x > 0 (Phi is increasing).
  double inverse_log(double level) const;
  /// x* with Phi(x*) = 1.
  double unit_point() const { return unit_point_; }

  /// Second divided differences on `points` geometric nodes of [lower, x_max],
  /// compared in the log domain so that neither underflow nor overflow occurs.
  ConvexityScan convexity_scan(double lower, int points = 4000) const;
  /// Scan with lower limit min(1e-6, x_c / 10), where x_c = (alpha / (alpha+1))^{1/alpha}
  /// is the inflection point of exp(-x^{-alpha}).
  ConvexityScan convexity_scan() const;
  double default_scan_lower() const;

  /// Phi(sqrt(t)) = exp(-t^{-alpha/2} + C t^{beta/2}), on [0, x_max^2].
  YoungFunction composed_with_sqrt() const;

  /// Psi(t) = sup_s (s t - Phi(s)). Throws RangeError outside the tabulated derivative range.
  double conjugate(double t) const;
  /// As conjugate(), but +inf above the tabulated range (for Luxemburg bisection).
  double conjugate_saturating(double t) const;
  /// The maximizer s*(t) of s t - Phi(s).
  double conjugate_argmax(double t) const;
  /// Largest t for which the conjugate is tabulated.
  double conjugate_t_max() const { return std::exp(log_t_max_); }

 private:
  double alpha_, beta_, C_, x_max_;
  double unit_point_ = 0;
  // Geometric table of (log s, log Phi'(s)) used to bracket Phi'(s) = t.
  std::vector<double> table_log_s_, table_log_dphi_;
  double log_t_min_ = 0, log_t_max_ = 0;
};

/// Smallest C (three significant digits) for which Phi_{alpha, beta, C} passes the
/// convexity scan on [default lower, x_max]. Throws SearchError past C = 1e6.
double choose_correction_constant(double alpha, double beta, double x_max = 10.0);
/// The uncached search behind choose_correction_constant.
double search_correction_constant(double alpha, double beta, double x_max);

/// inf{k > 0 : sum_n w_n F(a_n / k) <= 1} for an increasing evaluator F with F(0) = 0.
/// `k_lower` must satisfy the constraint's failure or equality; found by doubling otherwise.
struct LuxemburgOptions {
  double rel_tol = 1e-10;
  int max_iter = 200;
};

double luxemburg_norm(std::span<const double> values, std::span<const double> weights,
                      const std::function<double(double)>& evaluator, double k_lower,
                      const LuxemburgOptions& options = {});

/// Sequence norm inf{k : sum Phi(|a_n| / k) <= 1}.
double luxemburg_sequence_norm(std::span<const double> a, const YoungFunction& phi);

/// sum_n Phi(a_n / k).
double luxemburg_modular(std::span<const double> a, const YoungFunction& phi, double k);

/// Sequence norm in l^Psi, Psi the conjugate of phi.
double conjugate_sequence_norm(std::span<const double> a, const YoungFunction& phi);

/// L^hat Phi norm of a grid spectrum: inf{lambda : dxi sum Phi(|u_hat_j| / lambda) <= 1}.
double luxemburg_frequency_norm(const Field& u, const YoungFunction& phi);

/// Piecewise-constant spectrum: pieces of height h_i on sets of measure exp(log_width_i).
struct SpectrumPiece {
  double height;
  double log_width;
};

/// Solves log sum_i exp(log_width_i + log Phi(h_i / lambda)) = 0 for lambda.
double luxemburg_piecewise_norm(std::span<const SpectrumPiece> pieces, const YoungFunction& phi,
                                const LuxemburgOptions& options = {});

/// l^Phi L^2: Luxemburg norm of the unit-block masses.
double modulation_orlicz_norm(const Field& u, const YoungFunction& phi);

/// Luxemburg norm of the length-N all-ones sequence in l^Psi.
double indicator_conjugate_norm(int n, const YoungFunction& phi);

/// Windowed root mean squares over 2^j consecutive indices.
/// Entry i of the result is the window starting at n = i - (2^j - 1), so every
/// window meeting the support of a is represented.
std::vector<double> block_l2_average(std::span<const double> a, int j);

}  // namespace nlslab
