#include "nlslab/data.hpp"

#include <cmath>
#include <numbers>
#include <array>
#include <random>

namespace nlslab {

std::string family_name(Family f) {
  switch (f) {
    case Family::flat_band: return "flat_band";
    case Family::gaussian: return "gaussian";
    case Family::power_decay: return "power_decay";
    case Family::log_decay: return "log_decay";
    case Family::random_phase: return "random_phase";
    case Family::random_bumps: return "random_bumps";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::flat_band, Family::gaussian, Family::power_decay, Family::log_decay, Family::random_phase,
                   Family::random_bumps})
    if (family_name(f) == name) return f;
  throw PreconditionError("unknown data family '" + name + "'");
}

namespace {

std::mt19937_64 keyed_rng(std::uint64_t seed, long long key) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(static_cast<std::uint64_t>(key) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

double margin_fraction(const Field& u) {
  return mass_fraction_within(u, 0.25 * u.grid().num_modes() * u.grid().mode_spacing());
}

Field generate_data(const FrequencyGrid& grid, const DataSpec& spec) {
  const double cutoff = 0.25 * grid.num_modes() * grid.mode_spacing();
  const double a = spec.amplitude;
  Field u(grid);
  switch (spec.family) {
    case Family::flat_band:
      if (!(spec.band_lo < spec.band_hi)) throw PreconditionError("flat_band: need lo < hi");
      u = project_band(Field::from_spectrum(grid, [a](double) { return a; }), spec.band_lo, spec.band_hi);
      break;
    case Family::gaussian: {
      // e^{-x^2/(2w^2)} has unitary transform w e^{-w^2 xi^2 / 2}.
      const double w = spec.width;
      u = Field::from_spectrum(grid, [=](double xi) { return a * w * std::exp(-0.5 * w * w * xi * xi); });
      break;
    }
    case Family::power_decay:
      if (!(spec.beta > 0)) throw PreconditionError("power_decay: beta must be positive");
      u = Field::from_spectrum(grid, [=](double xi) {
        return std::abs(xi) < cutoff ? a * std::pow(1 + std::abs(xi), -spec.beta) : 0.0;
      });
      break;
    case Family::log_decay:
      if (!(spec.gamma > 0)) throw PreconditionError("log_decay: gamma must be positive");
      u = Field::from_spectrum(grid, [=](double xi) {
        return std::abs(xi) < cutoff ? a * std::pow(std::log(2 + std::abs(xi)), -spec.gamma) : 0.0;
      });
      break;
    case Family::random_phase: {
      if (!(spec.band_lo < spec.band_hi)) throw PreconditionError("random_phase: need lo < hi");
      const int m = grid.modes_per_unit();
      for (Eigen::Index s = 0; s < u.size(); ++s) {
        const double xi = grid.xi_at_slot(s);
        if (xi < spec.band_lo || xi >= spec.band_hi) continue;
        const int j = grid.index_of(s);
        const long long block = j >= 0 ? j / m : -((-j + m - 1) / m);
        auto rng = keyed_rng(spec.seed, block);
        std::uniform_real_distribution<double> phase(0, 2 * std::numbers::pi), amp(0.5, 1.5);
        const double theta = phase(rng);
        const double r = spec.random_amplitude ? amp(rng) : 1.0;
        u.coeffs()[s] = std::polar(a * r, theta);
      }
      break;
    }
    case Family::random_bumps: {
      // Five Gaussian bumps in frequency with random centres, widths and phases.
      auto rng = keyed_rng(spec.seed, -1);
      std::uniform_real_distribution<double> centre(-0.4 * cutoff, 0.4 * cutoff), width(0.3, 2.0),
          phase(0, 2 * std::numbers::pi), amp(0.2, 1.0);
      std::vector<std::array<double, 4>> bumps(5);
      for (auto& b : bumps) b = {centre(rng), width(rng), phase(rng), amp(rng)};
      for (Eigen::Index s = 0; s < u.size(); ++s) {
        const double xi = grid.xi_at_slot(s);
        std::complex<double> value = 0;
        for (const auto& b : bumps)
          value += std::polar(a * b[3] * std::exp(-0.5 * std::pow((xi - b[0]) / b[1], 2)), b[2]);
        u.coeffs()[s] = value;
      }
      break;
    }
  }
  if (u.coeffs().squaredNorm() > 0 && margin_fraction(u) < 0.9999)
    throw PreconditionError(family_name(spec.family) + ": less than 99.99% of the mass lies within |xi| <= " +
                            std::to_string(cutoff) + "; widen the grid");
  return u;
}

}  // namespace nlslab
