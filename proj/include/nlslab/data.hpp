#pragma once

// Initial-data families. Every generated spectrum keeps 99.99% of its L^2
// mass inside |xi| <= N dxi / 4, leaving room for the cubic nonlinearity.

#include <cstdint>
#include <string>

#include "nlslab/spectral.hpp"

namespace nlslab {

enum class Family { flat_band, gaussian, power_decay, log_decay, random_phase, random_bumps };

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct DataSpec {
  Family family = Family::gaussian;
  double band_lo = 0, band_hi = 1;  // flat_band, random_phase support
  double beta = 1;                  // power_decay: (1 + |xi|)^{-beta}
  double gamma = 3;                 // log_decay: ln^{-gamma}(2 + |xi|)
  double width = 1;                 // gaussian: e^{-x^2 / (2 width^2)} in x
  bool random_amplitude = false;    // random_phase: amplitude in [1/2, 3/2] per block
  double amplitude = 1;
  std::uint64_t seed = 0;
};

/// Deterministic for a fixed spec; random draws are keyed by (seed, unit block) so the
/// same function of xi is produced on every grid.
Field generate_data(const FrequencyGrid& grid, const DataSpec& spec);

/// Fraction of L^2 mass within |xi| <= N dxi / 4.
double margin_fraction(const Field& u);

}  // namespace nlslab
