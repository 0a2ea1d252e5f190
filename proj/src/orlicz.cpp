#include "nlslab/orlicz.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "nlslab/norms.hpp"

namespace nlslab {

namespace {

constexpr double kUnderflowExponent = 700.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 - e^{d}) for d < 0.
double log_one_minus_exp(double d) {
  return d > -0.693 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d));
}

/// Bisection on an increasing function f over [lo, hi] for f = 0.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, int iterations = 200, double tol = 1e-15) {
  for (int i = 0; i < iterations && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

YoungFunction::YoungFunction(double alpha, double beta, double C, double x_max)
    : alpha_(alpha), beta_(beta), C_(C), x_max_(x_max) {
  if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("YoungFunction: alpha and beta must be positive");
  if (!(C >= 0)) throw PreconditionError("YoungFunction: C must be nonnegative");
  if (!(x_max >= 1)) throw PreconditionError("YoungFunction: x_max must be at least 1");
  unit_point_ = inverse_log(0.0);

  // The lower end is where Phi' is far below any t we will be asked about.
  const int points = 4096;
  const double lo = std::log(1e-300), hi = std::log(x_max_);
  table_log_s_.resize(points);
  table_log_dphi_.resize(points);
  for (int i = 0; i < points; ++i) {
    table_log_s_[i] = lo + (hi - lo) * i / (points - 1);
    table_log_dphi_[i] = log_derivative(std::exp(table_log_s_[i]));
  }
  log_t_min_ = table_log_dphi_.front();
  // Keep the conjugate's range representable: t itself must be a finite double.
  log_t_max_ = std::min(table_log_dphi_.back(), kUnderflowExponent);
}

YoungFunction YoungFunction::standard_instance(double gamma, int level, double x_max, bool convex_sqrt) {
  if (!(gamma > 0) || level < 0 || level > 2) throw PreconditionError("standard_instance: need gamma > 0, level 0..2");
  const double scale = std::ldexp(1.0, level);
  const double alpha = 1.0 / (scale * gamma), beta = 1.0 / scale;
  return convex_sqrt ? with_convex_sqrt(alpha, beta, x_max)
                     : YoungFunction(alpha, beta, choose_correction_constant(alpha, beta, x_max), x_max);
}

YoungFunction YoungFunction::with_convex_sqrt(double alpha, double beta, double x_max) {
  // Phi(sqrt t) = exp(-t^{-alpha/2} + C t^{beta/2}) on [0, x_max^2]; its convexity implies Phi's.
  return YoungFunction(alpha, beta, choose_correction_constant(alpha / 2, beta / 2, x_max * x_max), x_max);
}

double YoungFunction::log_value(double x) const {
  if (x <= 0) return kNegInf;
  return -std::pow(x, -alpha_) + C_ * std::pow(x, beta_);
}

double YoungFunction::operator()(double x) const {
  if (x <= 0) return 0.0;
  const double decay = std::pow(x, -alpha_);
  if (decay > kUnderflowExponent) return 0.0;
  return std::exp(-decay + C_ * std::pow(x, beta_));
}

double YoungFunction::log_g_prime(double x) const {
  const double lx = std::log(x);
  const double a = std::log(alpha_) - (alpha_ + 1) * lx;
  if (C_ == 0) return a;
  return log_add(a, std::log(C_ * beta_) + (beta_ - 1) * lx);
}

double YoungFunction::log_derivative(double x) const {
  if (x <= 0) return kNegInf;
  return log_value(x) + log_g_prime(x);
}

double YoungFunction::inverse_log(double level) const {
  // Bracket in log x, then bisect.
  double lo = -1.0, hi = 1.0;
  while (log_value(std::exp(lo)) > level) {
    lo *= 2;
    if (lo < -1e4) throw SearchError("YoungFunction::inverse_log: level below range");
  }
  while (log_value(std::exp(hi)) < level) {
    hi *= 2;
    if (hi > 1e4) throw SearchError("YoungFunction::inverse_log: level above range");
  }
  return std::exp(bisect_increasing([&](double lx) { return log_value(std::exp(lx)) - level; }, lo, hi));
}

double YoungFunction::default_scan_lower() const {
  const double inflection = std::pow(alpha_ / (alpha_ + 1), 1.0 / alpha_);
  return std::min(1e-6, inflection / 10);
}

ConvexityScan YoungFunction::convexity_scan() const { return convexity_scan(default_scan_lower()); }

ConvexityScan YoungFunction::convexity_scan(double lower, int points) const {
  ConvexityScan scan;
  scan.lower = lower;
  scan.upper = x_max_;
  const double a = std::log(lower), b = std::log(x_max_);
  std::vector<double> x(points), g(points);
  for (int i = 0; i < points; ++i) {
    x[i] = std::exp(a + (b - a) * i / (points - 1));
    g[i] = log_value(x[i]);
  }
  // log of the slope (Phi(x_{i+1}) - Phi(x_i)) / (x_{i+1} - x_i), without forming Phi.
  auto log_slope = [&](int i) {
    return g[i + 1] + log_one_minus_exp(g[i] - g[i + 1]) - std::log(x[i + 1] - x[i]);
  };
  double left = log_slope(0);
  for (int i = 1; i + 1 < points; ++i) {
    const double right = log_slope(i);
    const double violation = left - right;
    if (violation > scan.worst_violation) {
      scan.worst_violation = violation;
      scan.worst_at = x[i];
    }
    left = right;
  }
  scan.convex = scan.worst_violation <= 1e-10;
  return scan;
}

YoungFunction YoungFunction::composed_with_sqrt() const {
  return YoungFunction(alpha_ / 2, beta_ / 2, C_, x_max_ * x_max_);
}

double YoungFunction::conjugate_argmax(double t) const {
  if (!(t > 0)) throw PreconditionError("convex_conjugate: t must be positive");
  const double lt = std::log(t);
  if (lt < log_t_min_ || lt > log_t_max_)
    throw RangeError("convex_conjugate: t = " + std::to_string(t) + " outside the tabulated range of Phi'");
  // Phi' is increasing for convex Phi; the first table entry at or above log t brackets the root.
  const auto it = std::lower_bound(table_log_dphi_.begin(), table_log_dphi_.end(), lt);
  const std::size_t idx = std::clamp<std::size_t>(it - table_log_dphi_.begin(), 1, table_log_dphi_.size() - 1);
  const double ls = bisect_increasing([&](double l) { return log_derivative(std::exp(l)) - lt; },
                                      table_log_s_[idx - 1], table_log_s_[idx], 200, 1e-16);
  return std::exp(ls);
}

double YoungFunction::conjugate(double t) const {
  const double s = conjugate_argmax(t);
  // At the maximizer Phi(s) = Phi'(s) / g'(s) = t / g'(s), so st - Phi(s) = t (s - 1/g'(s)),
  // which avoids cancelling two nearly equal numbers.
  return std::max(0.0, t * (s - std::exp(-log_g_prime(s))));
}

double YoungFunction::conjugate_saturating(double t) const {
  if (t <= 0) return 0.0;
  const double lt = std::log(t);
  if (lt > log_t_max_) return std::numeric_limits<double>::infinity();
  if (lt < log_t_min_) return 0.0;
  return conjugate(t);
}

double choose_correction_constant(double alpha, double beta, double x_max) {
  // The scan is deterministic, so repeated requests are served from a cache.
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, double> cache;
  const auto key = std::make_tuple(alpha, beta, x_max);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double C = search_correction_constant(alpha, beta, x_max);
  std::lock_guard lock(mutex);
  cache.emplace(key, C);
  return C;
}

double search_correction_constant(double alpha, double beta, double x_max) {
  auto convex = [&](double C) { return YoungFunction(alpha, beta, C, x_max).convexity_scan().convex; };
  if (convex(0.0)) return 0.0;
  double hi = 1e-3;
  while (!convex(hi)) {
    hi *= 2;
    if (hi > 1e6) throw SearchError("choose_correction_constant: no convex Phi up to C = 1e6");
  }
  double lo = hi / 2;
  if (hi == 1e-3) lo = 0;
  while ((hi - lo) > 5e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    (convex(mid) ? hi : lo) = mid;
  }
  // Round up to three significant digits, staying on the convex side.
  const double scale = std::pow(10.0, std::floor(std::log10(hi)) - 2);
  double rounded = std::ceil(hi / scale - 1e-9) * scale;
  if (!convex(rounded)) rounded = hi;
  return rounded;
}

double luxemburg_norm(std::span<const double> values, std::span<const double> weights,
                      const std::function<double(double)>& evaluator, double k_lower,
                      const LuxemburgOptions& options) {
  if (!weights.empty() && weights.size() != values.size())
    throw PreconditionError("luxemburg_norm: weights and values differ in length");
  double peak = 0;
  for (double v : values) {
    if (v < 0) throw PreconditionError("luxemburg_norm: entries must be nonnegative");
    peak = std::max(peak, v);
  }
  if (peak == 0) return 0.0;
  auto modular = [&](double k) {
    double sum = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > 0) sum += (weights.empty() ? 1.0 : weights[i]) * evaluator(values[i] / k);
    return sum;
  };
  double lo = k_lower > 0 ? k_lower : peak;
  while (modular(lo) <= 1) {
    lo /= 2;
    if (lo < 1e-300) throw SearchError("luxemburg_norm: lower bracket not found");
  }
  double hi = std::max(lo * 2, k_lower);
  while (modular(hi) > 1) {
    lo = hi;
    hi *= 2;
    if (!std::isfinite(hi)) throw SearchError("luxemburg_norm: upper bracket not found");
  }
  for (int i = 0; i < options.max_iter && hi - lo > options.rel_tol * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (modular(mid) > 1 ? lo : hi) = mid;
  }
  return hi;
}

double luxemburg_modular(std::span<const double> a, const YoungFunction& phi, double k) {
  double sum = 0;
  for (double v : a) sum += phi(v / k);
  return sum;
}

double luxemburg_sequence_norm(std::span<const double> a, const YoungFunction& phi) {
  double peak = 0;
  for (double v : a) {
    if (v < 0) throw PreconditionError("luxemburg_sequence_norm: entries must be nonnegative");
    peak = std::max(peak, v);
  }
  if (peak == 0) return 0.0;
  // Phi(peak / k) <= 1 forces k >= peak / x*; the doubling search starts from there.
  const double k_lo = peak / phi.unit_point();
  return luxemburg_norm(a, {}, [&](double x) { return phi(x); }, k_lo);
}

double conjugate_sequence_norm(std::span<const double> a, const YoungFunction& phi) {
  double peak = 0;
  for (double v : a) peak = std::max(peak, v);
  if (peak == 0) return 0.0;
  // Psi(t*) = 1 gives the single-entry scale.
  const double t_star = std::exp(bisect_increasing(
      [&](double lt) { return std::log(std::max(phi.conjugate_saturating(std::exp(lt)), 1e-300)); },
      std::log(1e-300), std::log(phi.conjugate_t_max())));
  return luxemburg_norm(a, {}, [&](double t) { return phi.conjugate_saturating(t); }, peak / t_star);
}

double luxemburg_frequency_norm(const Field& u, const YoungFunction& phi) {
  std::vector<double> values(u.size());
  double peak = 0;
  for (Eigen::Index s = 0; s < u.size(); ++s) {
    values[s] = std::abs(u.coeffs()[s]);
    peak = std::max(peak, values[s]);
  }
  if (peak == 0) return 0.0;
  const std::vector<double> weights(values.size(), u.grid().mode_spacing());
  // dxi Phi(peak / k) <= 1 needs peak / k <= Phi^{-1}(1 / dxi).
  const double k_lo = peak / phi.inverse_log(-std::log(u.grid().mode_spacing()));
  return luxemburg_norm(values, weights, [&](double x) { return phi(x); }, k_lo);
}

double luxemburg_piecewise_norm(std::span<const SpectrumPiece> pieces, const YoungFunction& phi,
                                const LuxemburgOptions& options) {
  double peak = 0;
  for (const auto& p : pieces) {
    if (p.height < 0) throw PreconditionError("luxemburg_piecewise_norm: heights must be nonnegative");
    peak = std::max(peak, p.height);
  }
  if (peak == 0) return 0.0;
  // F(log lambda) = log sum exp(l_i + log Phi(h_i / lambda)) is decreasing in lambda.
  auto F = [&](double log_lambda) {
    double acc = kNegInf;
    for (const auto& p : pieces)
      if (p.height > 0) acc = log_add(acc, p.log_width + phi.log_value(p.height * std::exp(-log_lambda)));
    return acc;
  };
  double lo = std::log(peak) - 1, hi = std::log(peak) + 1;
  while (F(lo) <= 0) {
    lo -= 2 * (hi - lo);
    if (lo < -1e4) throw SearchError("luxemburg_piecewise_norm: lower bracket not found");
  }
  while (F(hi) > 0) {
    hi += 2 * (hi - lo);
    if (hi > 1e4) throw SearchError("luxemburg_piecewise_norm: upper bracket not found");
  }
  for (int i = 0; i < options.max_iter && hi - lo > options.rel_tol * 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) > 0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

double modulation_orlicz_norm(const Field& u, const YoungFunction& phi) {
  std::vector<double> masses;
  for (const auto& b : unit_blocks(u)) masses.push_back(b.mass);
  return luxemburg_sequence_norm(masses, phi);
}

double indicator_conjugate_norm(int n, const YoungFunction& phi) {
  if (n < 16) throw PreconditionError("indicator_conjugate_norm: N must be at least 16");
  const std::vector<double> ones(n, 1.0);
  return conjugate_sequence_norm(ones, phi);
}

std::vector<double> block_l2_average(std::span<const double> a, int j) {
  if (j < 0) throw PreconditionError("block_l2_average: scale j must be nonnegative");
  const long width = 1L << j;
  const long len = static_cast<long>(a.size());
  std::vector<double> out;
  if (len == 0) return out;
  out.reserve(len + width - 1);
  const double inv = 1.0 / static_cast<double>(width);
  for (long start = -(width - 1); start < len; ++start) {
    double sum = 0;
    for (long k = std::max(0L, start); k < std::min(len, start + width); ++k) sum += a[k] * a[k];
    out.push_back(std::sqrt(sum * inv));
  }
  return out;
}

}  // namespace nlslab
