#pragma once

// Lebesgue, Sobolev, Fourier-Lebesgue, modulation, mixed space-time and
// dyadic Bourgain norms. Everything here is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "nlslab/spectral.hpp"

namespace nlslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Hoelder conjugate 1/p + 1/p' = 1, with 1' = inf and inf' = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

namespace detail {

inline void check_exponent(double p, const char* who) {
  if (!(p >= 1.0)) throw PreconditionError(std::string(who) + ": exponent must lie in [1, inf]");
}

/// (w * sum |a_i|^p)^{1/p}, scaled by the max entry so large p cannot overflow.
template <typename Scalar, typename Range>
Scalar weighted_lp(const Range& magnitudes, Scalar weight, double p) {
  Scalar peak = 0;
  for (Scalar a : magnitudes) peak = std::max(peak, a);
  if (std::isinf(p)) return peak;
  if (peak == 0) return 0;
  Scalar sum = 0;
  for (Scalar a : magnitudes) {
    if (a == 0) continue;
    sum += std::pow(a / peak, static_cast<Scalar>(p));
  }
  return peak * std::pow(weight * sum, static_cast<Scalar>(1.0 / p));
}

template <typename Scalar>
std::vector<Scalar> moduli(const ComplexVector<Scalar>& v) {
  std::vector<Scalar> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = std::abs(v[i]);
  return out;
}

}  // namespace detail

/// ||u||_{L^p_x} by the rectangle rule on the physical grid (exact for
/// trigonometric polynomials of low enough degree).
template <typename Scalar>
Scalar lebesgue_norm(const SpectralField<Scalar>& u, double p) {
  detail::check_exponent(p, "lebesgue_norm");
  const auto samples = inverse_transform(u);
  return detail::weighted_lp(detail::moduli(samples), static_cast<Scalar>(u.grid().dx()), p);
}

/// Homogeneous: (dxi sum |xi|^{2s} |u_hat|^2)^{1/2}. Inhomogeneous uses (1 + xi^2)^s.
template <typename Scalar>
Scalar sobolev_norm(const SpectralField<Scalar>& u, double s, bool homogeneous) {
  const auto& c = u.coeffs();
  Scalar sum = 0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const Scalar mass = std::norm(c[k]);
    if (mass == 0) continue;
    const double xi = u.grid().xi_at_slot(k);
    double weight;
    if (homogeneous) {
      if (xi == 0.0) {
        if (s < 0)
          throw DomainError("sobolev_norm: homogeneous norm of negative order needs a zero DC mode");
        weight = s == 0 ? 1.0 : 0.0;
      } else {
        weight = std::pow(std::abs(xi), 2.0 * s);
      }
    } else {
      weight = std::pow(1.0 + xi * xi, s);
    }
    sum += static_cast<Scalar>(weight) * mass;
  }
  return std::sqrt(u.dxi() * sum);
}

/// ||u||_{L^hat r} = ||u_hat||_{L^{r'}}; r = 1 gives sup |u_hat|.
template <typename Scalar>
Scalar fourier_lebesgue_norm(const SpectralField<Scalar>& u, double r) {
  detail::check_exponent(r, "fourier_lebesgue_norm");
  return detail::weighted_lp(detail::moduli(u.coeffs()), u.dxi(), conjugate_exponent(r));
}

/// M_{2,p}: l^p sum of unit-block L^2 masses.
template <typename Scalar>
Scalar modulation_norm(const SpectralField<Scalar>& u, double p) {
  detail::check_exponent(p, "modulation_norm");
  if (std::isinf(p)) throw PreconditionError("modulation_norm: p must be finite");
  std::vector<Scalar> masses;
  for (const auto& b : unit_blocks(u)) masses.push_back(b.mass);
  return detail::weighted_lp(masses, Scalar(1), p);
}

/// ||U||_{L^p_t L^q_x}: left-endpoint Riemann sum over [t_0, t_M); p = inf is the max over frames.
template <typename Scalar>
Scalar mixed_spacetime_norm(const SpaceTimeField<Scalar>& field, double p, double q) {
  detail::check_exponent(p, "mixed_spacetime_norm");
  detail::check_exponent(q, "mixed_spacetime_norm");
  const std::size_t count = std::isinf(p) ? field.size() : field.size() - 1;
  std::vector<Scalar> spatial(count);
  for (std::size_t k = 0; k < count; ++k) spatial[k] = lebesgue_norm(field.frame(k), q);
  return detail::weighted_lp(spatial, static_cast<Scalar>(field.dt()), p);
}

/// sup over frames of M_{2,p}.
template <typename Scalar>
Scalar sup_modulation_norm(const SpaceTimeField<Scalar>& field, double p) {
  Scalar best = 0;
  for (const auto& f : field.frames()) best = std::max(best, modulation_norm(f, p));
  return best;
}

enum class BourgainVariant { sup, sum };

/// Dyadic shells of the space-time Fourier transform around the paraboloid.
struct ModulationShells {
  double dsigma = 0;               // time-frequency spacing 2 pi / (n dt)
  std::vector<double> mu;          // shell [mu, 2 mu)
  std::vector<double> weighted;    // int_{shell} |u~|^2 |xi|^{2s} |sigma| dxi dsigma
  std::vector<double> mass;        // int_{shell} |u~|^2 |xi|^{2s} dxi dsigma (no |sigma| weight)
  double zero_mass = 0;            // the sigma = 0 bin, which carries no |sigma| weight
};

/// Tukey window with cosine tapers over the first and last `fraction` of [0, 1].
inline double tukey_window(double s, double fraction = 0.1) {
  if (s < 0 || s > 1) return 0;
  if (s < fraction) return 0.5 * (1 - std::cos(std::numbers::pi * s / fraction));
  if (s > 1 - fraction) return 0.5 * (1 - std::cos(std::numbers::pi * (1 - s) / fraction));
  return 1;
}

/// Shell decomposition used by bourgain_norm. The frames are untwisted by
/// e^{+it xi^2}, so the remaining time frequency sigma is the distance to the
/// paraboloid; a free wave sits at sigma = 0 up to the window's spread.
template <typename Scalar>
ModulationShells modulation_shells(const SpaceTimeField<Scalar>& field, double s = 0.0) {
  const std::size_t nt = field.size();
  if (nt < 8) throw ResolutionError("bourgain_norm: need at least 8 time samples");
  const auto& grid = field.grid();
  const Eigen::Index nx = grid.num_modes();
  const double dt = field.dt();
  const double t0 = field.times().front();
  const double horizon = field.horizon();

  std::vector<double> xi_weight(nx);
  for (Eigen::Index k = 0; k < nx; ++k) {
    const double xi = grid.xi_at_slot(k);
    xi_weight[k] = s == 0 ? 1.0 : (xi == 0 ? (s > 0 ? 0.0 : kInf) : std::pow(std::abs(xi), 2 * s));
  }

  // One time series per spatial mode.
  using C = std::complex<Scalar>;
  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> series(nt, nx);
  for (std::size_t n = 0; n < nt; ++n) {
    const double t = field.times()[n];
    const double w = tukey_window(horizon > 0 ? (t - t0) / horizon : 0.0);
    const auto& c = field.frame(n).coeffs();
    for (Eigen::Index k = 0; k < nx; ++k) {
      const double xi = grid.xi_at_slot(k);
      long double phase = std::fmod(static_cast<long double>(t) * xi * xi, 2 * std::numbers::pi_v<long double>);
      series(n, k) = static_cast<Scalar>(w) * c[k] *
                     C(static_cast<Scalar>(std::cos(phase)), static_cast<Scalar>(std::sin(phase)));
    }
  }

  ModulationShells out;
  out.dsigma = 2 * std::numbers::pi / (nt * dt);
  const double scale = dt / std::sqrt(2 * std::numbers::pi);  // unitary time transform
  const double measure = grid.mode_spacing() * out.dsigma;
  const std::size_t half = nt / 2;
  const double sigma_max = out.dsigma * static_cast<double>(half);
  for (double mu = out.dsigma; mu <= sigma_max; mu *= 2) out.mu.push_back(mu);
  out.weighted.assign(out.mu.size(), 0.0);
  out.mass.assign(out.mu.size(), 0.0);

  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
  std::vector<C> in(nt), spec(nt);
  for (Eigen::Index k = 0; k < nx; ++k) {
    bool any = false;
    for (std::size_t n = 0; n < nt; ++n) {
      in[n] = series(n, k);
      any = any || in[n] != C(0);
    }
    if (!any) continue;
    if (std::isinf(xi_weight[k]))
      throw DomainError("bourgain_norm: negative order with a nonzero xi = 0 mode");
    fft.fwd(spec, in);
    for (std::size_t b = 0; b < nt; ++b) {
      const long long sb = b <= half ? static_cast<long long>(b) : static_cast<long long>(b) - static_cast<long long>(nt);
      const double sigma = std::abs(static_cast<double>(sb)) * out.dsigma;
      const double density = std::norm(spec[b]) * scale * scale * xi_weight[k] * measure;
      if (sb == 0) {
        out.zero_mass += density;
        continue;
      }
      const auto shell = static_cast<std::size_t>(std::floor(std::log2(sigma / out.dsigma) + 1e-12));
      if (shell >= out.mu.size()) continue;
      out.weighted[shell] += density * sigma;
      out.mass[shell] += density;
    }
  }
  return out;
}

/// Sampled X^{s,1/2,inf} (sup) or X^{s,1/2,1} (sum) norm over dyadic shells.
template <typename Scalar>
Scalar bourgain_norm(const SpaceTimeField<Scalar>& field, double s, BourgainVariant variant) {
  const auto shells = modulation_shells(field, s);
  double sup = 0, sum = 0;
  for (double w : shells.weighted) {
    const double r = std::sqrt(w);
    sup = std::max(sup, r);
    sum += r;
  }
  return static_cast<Scalar>(variant == BourgainVariant::sup ? sup : sum);
}

// Declarative norm selection, used by the CLI and the Picard monitor.

struct LebesgueSpec { double p; };
struct SobolevSpec { double s; bool homogeneous; };
struct FourierLebesgueSpec { double r; };
struct ModulationSpec { double p; };
struct MixedSpaceTimeSpec { double p, q; };
struct BourgainSpec { double s; BourgainVariant variant; };

using NormSpec = std::variant<LebesgueSpec, SobolevSpec, FourierLebesgueSpec, ModulationSpec,
                              MixedSpaceTimeSpec, BourgainSpec>;

inline std::string norm_kind(const NormSpec& spec) {
  struct Visitor {
    std::string operator()(const LebesgueSpec&) const { return "lebesgue"; }
    std::string operator()(const SobolevSpec&) const { return "sobolev"; }
    std::string operator()(const FourierLebesgueSpec&) const { return "fourier_lebesgue"; }
    std::string operator()(const ModulationSpec&) const { return "modulation"; }
    std::string operator()(const MixedSpaceTimeSpec&) const { return "mixed_spacetime"; }
    std::string operator()(const BourgainSpec&) const { return "bourgain"; }
  };
  return std::visit(Visitor{}, spec);
}

inline bool is_spacetime(const NormSpec& spec) {
  return std::holds_alternative<MixedSpaceTimeSpec>(spec) || std::holds_alternative<BourgainSpec>(spec);
}

template <typename Scalar>
Scalar evaluate_norm(const NormSpec& spec, const SpectralField<Scalar>& u) {
  if (auto* a = std::get_if<LebesgueSpec>(&spec)) return lebesgue_norm(u, a->p);
  if (auto* a = std::get_if<SobolevSpec>(&spec)) return sobolev_norm(u, a->s, a->homogeneous);
  if (auto* a = std::get_if<FourierLebesgueSpec>(&spec)) return fourier_lebesgue_norm(u, a->r);
  if (auto* a = std::get_if<ModulationSpec>(&spec)) return modulation_norm(u, a->p);
  throw PreconditionError("evaluate_norm: " + norm_kind(spec) + " needs a space-time field");
}

/// Space-time kinds are evaluated directly; spatial kinds are taken as sup over frames.
template <typename Scalar>
Scalar evaluate_norm(const NormSpec& spec, const SpaceTimeField<Scalar>& field) {
  if (auto* a = std::get_if<MixedSpaceTimeSpec>(&spec)) return mixed_spacetime_norm(field, a->p, a->q);
  if (auto* a = std::get_if<BourgainSpec>(&spec)) return bourgain_norm(field, a->s, a->variant);
  Scalar best = 0;
  for (const auto& f : field.frames()) best = std::max(best, evaluate_norm(spec, f));
  return best;
}

}  // namespace nlslab
