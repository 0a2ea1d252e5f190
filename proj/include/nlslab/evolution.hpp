#pragma once

// Cubic NLS  i u_t + u_xx - sigma |u|^2 u = 0  (sigma = +1 defocusing).
// The free flow e^{it Delta} is the Fourier multiplier e^{-it xi^2}.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/norms.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace detail {

/// e^{-i t xi^2}, with the phase reduced in extended precision so large t xi^2 stays accurate.
template <typename Scalar>
std::complex<Scalar> free_phase(double t, double xi) {
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  const long double arg = std::fmod(static_cast<long double>(t) * xi * xi, two_pi);
  return {static_cast<Scalar>(std::cos(arg)), static_cast<Scalar>(-std::sin(arg))};
}

}  // namespace detail

template <typename Scalar>
SpectralField<Scalar> free_evolve(const SpectralField<Scalar>& u0, double t) {
  SpectralField<Scalar> out = u0;
  if (t == 0) return out;
  auto& c = out.coeffs();
  for (Eigen::Index s = 0; s < c.size(); ++s)
    if (c[s] != std::complex<Scalar>(0)) c[s] *= detail::free_phase<Scalar>(t, u0.grid().xi_at_slot(s));
  return out;
}

/// Frames e^{it Delta} u0 at t = k T / M, k = 0..M.
template <typename Scalar>
SpaceTimeField<Scalar> free_trajectory(const SpectralField<Scalar>& u0, double horizon, int steps) {
  if (steps < 1) throw PreconditionError("free_trajectory: need at least one step");
  std::vector<SpectralField<Scalar>> frames;
  frames.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) frames.push_back(free_evolve(u0, horizon * k / steps));
  return SpaceTimeField<Scalar>::uniform(u0.grid(), 0.0, horizon, std::move(frames));
}

/// Number of grid slots that a frequency shift by c spans; c must be a multiple of dxi.
inline int lattice_shift(const FrequencyGrid& grid, double c) {
  const double slots = c * grid.modes_per_unit();
  const double rounded = std::round(slots);
  if (std::abs(slots - rounded) > 1e-9 * std::max(1.0, std::abs(slots)))
    throw PreconditionError("galilean_boost: c = " + std::to_string(c) +
                            " is not a multiple of the mode spacing");
  return static_cast<int>(rounded);
}

namespace detail {

/// out_hat(xi) = u_hat(xi - c); rejects shifts that push visible mass off the grid.
template <typename Scalar>
SpectralField<Scalar> shift_spectrum(const SpectralField<Scalar>& u, int shift) {
  SpectralField<Scalar> out(u.grid());
  const auto& src = u.coeffs();
  auto& dst = out.coeffs();
  const Eigen::Index n = src.size();
  Scalar lost = 0, total = src.squaredNorm();
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index target = s + shift;
    if (target < 0 || target >= n)
      lost += std::norm(src[s]);
    else
      dst[target] = src[s];
  }
  if (lost > 1e-24 * total)
    throw PreconditionError("galilean_boost: shifted spectrum leaves the grid");
  return out;
}

}  // namespace detail

/// Initial data of the boosted solution, e^{icx} u0: spectrum translated by c.
template <typename Scalar>
SpectralField<Scalar> galilean_boost(const SpectralField<Scalar>& u0, double c) {
  return detail::shift_spectrum(u0, lattice_shift(u0.grid(), c));
}

/// u_c(t, x) = e^{-i(c^2 t - c x)} u(t, x - 2ct), frame by frame. In Fourier:
/// u_c_hat(t, xi) = e^{-i c^2 t} e^{-2ict (xi - c)} u_hat(t, xi - c).
template <typename Scalar>
SpaceTimeField<Scalar> galilean_reference(const SpaceTimeField<Scalar>& field, double c) {
  const int shift = lattice_shift(field.grid(), c);
  std::vector<SpectralField<Scalar>> frames;
  frames.reserve(field.size());
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double t = field.times()[k];
    auto shifted = detail::shift_spectrum(field.frame(k), shift);
    auto& coeffs = shifted.coeffs();
    for (Eigen::Index s = 0; s < coeffs.size(); ++s) {
      const long double xi_src = field.grid().xi_at_slot(s) - static_cast<long double>(c);
      const long double arg = std::fmod(static_cast<long double>(c) * c * t + 2.0L * c * t * xi_src, two_pi);
      coeffs[s] *= std::complex<Scalar>(static_cast<Scalar>(std::cos(arg)), static_cast<Scalar>(-std::sin(arg)));
    }
    frames.push_back(std::move(shifted));
  }
  return SpaceTimeField<Scalar>(field.grid(), field.times(), std::move(frames));
}

/// v0(x) = lambda u0(lambda x), so v0_hat(xi) = u0_hat(xi / lambda). The
/// coefficient array is kept and reinterpreted on the grid with m' = m / lambda,
/// whose modes are exactly lambda times the original ones.
template <typename Scalar>
SpectralField<Scalar> rescale(const SpectralField<Scalar>& u0, double lambda) {
  const double k = std::log2(lambda);
  if (!(lambda > 0) || std::abs(k - std::round(k)) > 1e-12)
    throw PreconditionError("rescale: lambda must be a power of two");
  const int m = u0.grid().modes_per_unit();
  const double target = m / lambda;
  if (std::abs(target - std::round(target)) > 1e-12 || target < 1)
    throw PreconditionError("rescale: m / lambda = " + std::to_string(target) +
                            " is not a positive integer; refine the source grid");
  const FrequencyGrid grid(u0.grid().num_modes(), static_cast<int>(std::round(target)));
  return SpectralField<Scalar>(grid, u0.coeffs());
}

struct EvolutionConfig {
  double horizon = 1.0;     // T
  int steps = 1000;         // M, dt = T / M
  int output_stride = 1;    // record every stride-th step
  bool dealias = true;      // 2/3 rule on nonlinear products
  double sign = 1.0;        // +1 defocusing, -1 focusing

  double dt() const { return horizon / steps; }
};

namespace detail {

/// Zero every mode with |j| > N/3.
template <typename Scalar>
void apply_two_thirds_mask(SpectralField<Scalar>& u) {
  const int cutoff = u.grid().num_modes() / 3;
  auto& c = u.coeffs();
  for (Eigen::Index s = 0; s < c.size(); ++s)
    if (std::abs(u.grid().index_of(s)) > cutoff) c[s] = 0;
}

template <typename Scalar>
void nonlinear_phase(ComplexVector<Scalar>& samples, double sign, double h) {
  for (Eigen::Index n = 0; n < samples.size(); ++n) {
    const Scalar theta = static_cast<Scalar>(-sign * h) * std::norm(samples[n]);
    samples[n] *= std::complex<Scalar>(std::cos(theta), std::sin(theta));
  }
}

template <typename Scalar>
void check_finite(const SpectralField<Scalar>& u, double t) {
  if (!u.coeffs().allFinite())
    throw NumericalError("splitstep_evolve: non-finite value at t = " + std::to_string(t));
}

}  // namespace detail

/// Strang splitting: half nonlinear phase, full free step, half nonlinear phase.
template <typename Scalar>
SpaceTimeField<Scalar> splitstep_evolve(const SpectralField<Scalar>& u0, const EvolutionConfig& config) {
  if (config.steps < 1 || !(config.horizon > 0) || config.output_stride < 1 ||
      config.steps % config.output_stride != 0)
    throw PreconditionError("splitstep_evolve: need T > 0, M >= 1 and stride dividing M");
  const double dt = config.dt();
  const auto& grid = u0.grid();

  std::vector<std::complex<Scalar>> linear(grid.num_modes());
  for (Eigen::Index s = 0; s < u0.size(); ++s) linear[s] = detail::free_phase<Scalar>(dt, grid.xi_at_slot(s));

  std::vector<SpectralField<Scalar>> frames{u0};
  SpectralField<Scalar> u = u0;
  for (int step = 1; step <= config.steps; ++step) {
    auto samples = inverse_transform(u);
    detail::nonlinear_phase(samples, config.sign, 0.5 * dt);
    u = forward_transform<Scalar>(grid, samples);
    if (config.dealias) detail::apply_two_thirds_mask(u);
    for (Eigen::Index s = 0; s < u.size(); ++s) u.coeffs()[s] *= linear[s];
    samples = inverse_transform(u);
    detail::nonlinear_phase(samples, config.sign, 0.5 * dt);
    u = forward_transform<Scalar>(grid, samples);
    if (config.dealias) detail::apply_two_thirds_mask(u);
    detail::check_finite(u, step * dt);
    if (step % config.output_stride == 0) frames.push_back(u);
  }
  return SpaceTimeField<Scalar>::uniform(grid, 0.0, config.horizon, std::move(frames));
}

template <typename Scalar>
Scalar mass(const SpectralField<Scalar>& u) {
  return u.dxi() * u.coeffs().squaredNorm();
}

/// E = int |u_x|^2 + (sigma / 2) |u|^4 dx.
template <typename Scalar>
Scalar energy(const SpectralField<Scalar>& u, double sign = 1.0) {
  Scalar kinetic = 0;
  const auto& c = u.coeffs();
  for (Eigen::Index s = 0; s < c.size(); ++s) {
    const double xi = u.grid().xi_at_slot(s);
    kinetic += static_cast<Scalar>(xi * xi) * std::norm(c[s]);
  }
  const Scalar l4 = lebesgue_norm(u, 4.0);
  return u.dxi() * kinetic + static_cast<Scalar>(0.5 * sign) * l4 * l4 * l4 * l4;
}

/// |u|^2 u, optionally 2/3-masked.
template <typename Scalar>
SpectralField<Scalar> cubic_term(const SpectralField<Scalar>& u, bool dealias = true) {
  auto samples = inverse_transform(u);
  for (Eigen::Index n = 0; n < samples.size(); ++n) samples[n] *= std::norm(samples[n]);
  auto out = forward_transform<Scalar>(u.grid(), samples);
  if (dealias) detail::apply_two_thirds_mask(out);
  return out;
}

/// D(t_k) = int_{t_0}^{t_k} e^{i(t_k - s) Delta} F(s) ds by the trapezoid rule on
/// the untwisted integrand e^{-is Delta} F(s).
template <typename Scalar>
SpaceTimeField<Scalar> duhamel_apply(const SpaceTimeField<Scalar>& forcing) {
  const auto& grid = forcing.grid();
  const double dt = forcing.dt();
  std::vector<SpectralField<Scalar>> frames;
  frames.reserve(forcing.size());
  SpectralField<Scalar> accumulated(grid);
  SpectralField<Scalar> previous = free_evolve(forcing.frame(0), -forcing.times()[0]);
  frames.push_back(SpectralField<Scalar>(grid));
  for (std::size_t k = 1; k < forcing.size(); ++k) {
    const double t = forcing.times()[k];
    SpectralField<Scalar> current = free_evolve(forcing.frame(k), -t);
    accumulated.coeffs() += static_cast<Scalar>(0.5 * dt) * (previous.coeffs() + current.coeffs());
    frames.push_back(free_evolve(accumulated, t));
    previous = std::move(current);
  }
  return SpaceTimeField<Scalar>(grid, forcing.times(), std::move(frames));
}

/// Time coefficient of the trilinear estimate, T^{1/2} + T^{1/4} + T^{1/p+}.
inline double trilinear_coefficient(double horizon, double p, double p_plus_factor = 1e-3) {
  const double p_plus = p * (1 + p_plus_factor);
  return std::sqrt(horizon) + std::pow(horizon, 0.25) + std::pow(horizon, 1.0 / p_plus);
}

template <typename Scalar>
using FrameMonitor = std::function<double(const SpectralField<Scalar>&)>;

template <typename Scalar>
FrameMonitor<Scalar> modulation_monitor(double p) {
  return [p](const SpectralField<Scalar>& f) { return static_cast<double>(modulation_norm(f, p)); };
}

struct PicardOptions {
  double horizon = 1.0;
  int steps = 1000;
  int iterations = 8;
  bool dealias = true;
  double sign = 1.0;
  double modulation_index = 4.0;  // p in A(T)
  bool keep_iterates = false;
};

template <typename Scalar>
struct PicardResult {
  std::vector<double> differences;  // D_n = sup_t monitor(u^{n+1} - u^n)
  std::vector<double> ratios;       // D_{n+1} / D_n
  bool diverged = false;            // three consecutive ratios above one
  double coefficient = 0;           // A(T)
  SpaceTimeField<Scalar> final_iterate;
  std::vector<SpaceTimeField<Scalar>> iterates;  // only with keep_iterates
};

/// u^0 = e^{it Delta} u0, u^{n+1} = e^{it Delta} u0 - i sigma Duhamel(|u^n|^2 u^n).
template <typename Scalar>
PicardResult<Scalar> picard_iterate(const SpectralField<Scalar>& u0, const PicardOptions& options,
                                    const FrameMonitor<Scalar>& monitor) {
  if (options.iterations < 2) throw PreconditionError("picard_iterate: need at least 2 iterations");
  const auto linear = free_trajectory(u0, options.horizon, options.steps);
  SpaceTimeField<Scalar> current = linear;
  PicardResult<Scalar> result{{}, {}, false, trilinear_coefficient(options.horizon, options.modulation_index),
                              linear, {}};
  if (options.keep_iterates) result.iterates.push_back(current);
  int above_one = 0;
  const std::complex<Scalar> factor(0, static_cast<Scalar>(-options.sign));
  for (int n = 0; n < options.iterations; ++n) {
    std::vector<SpectralField<Scalar>> forcing;
    forcing.reserve(current.size());
    for (const auto& f : current.frames()) forcing.push_back(cubic_term(f, options.dealias));
    const auto duhamel =
        duhamel_apply(SpaceTimeField<Scalar>(current.grid(), current.times(), std::move(forcing)));
    std::vector<SpectralField<Scalar>> next;
    next.reserve(current.size());
    double diff = 0;
    for (std::size_t k = 0; k < current.size(); ++k) {
      next.push_back(linear.frame(k) + factor * duhamel.frame(k));
      diff = std::max(diff, monitor(next.back() - current.frame(k)));
    }
    current = SpaceTimeField<Scalar>(current.grid(), current.times(), std::move(next));
    if (options.keep_iterates) result.iterates.push_back(current);
    if (!result.differences.empty()) {
      const double prev = result.differences.back();
      const double ratio = prev > 0 ? diff / prev : 0.0;
      result.ratios.push_back(ratio);
      above_one = ratio > 1 ? above_one + 1 : 0;
      if (above_one >= 3) result.diverged = true;
    }
    result.differences.push_back(diff);
  }
  result.final_iterate = current;
  return result;
}

}  // namespace nlslab
