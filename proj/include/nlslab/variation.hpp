#pragma once

// Sampled V^p norms, U^p atomic upper bounds and the U^2 / V^2 duality pairing.

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "nlslab/spectral.hpp"

namespace nlslab {

/// L^2-valued path sampled at increasing times. With `tail`, a final jump to the
/// zero element is appended, emulating v(inf) = 0.
struct TimeSampledPath {
  std::vector<double> times;
  std::vector<Field> values;
  bool tail = false;

  TimeSampledPath(std::vector<double> t, std::vector<Field> v, bool with_tail = false);
  std::size_t size() const { return values.size(); }
};

TimeSampledPath path_from(const SpaceTimeField<double>& field, bool tail = false);

struct VariationResult {
  double value = 0;
  /// Sample indices of a maximizing partition; index size() stands for the tail.
  std::vector<std::size_t> partition;
};

/// Exact sup over sub-partitions of the sample grid, by dynamic programming:
/// best(j) = max(0, max_{i<j} best(i) + ||v_j - v_i||^p).
VariationResult vp_norm_detailed(const TimeSampledPath& path, double p);
double vp_norm(const TimeSampledPath& path, double p);

/// The sampled value is a lower bound for the continuum norm. This doubles the sampling,
/// sample(0), sample(1), ..., until the relative change drops below `tolerance`.
struct RefinedVariation {
  double value = 0;
  int levels = 0;            // samplings evaluated
  double last_change = 0;    // relative change at the final doubling
  bool converged = false;
};
RefinedVariation vp_norm_refined(const std::function<TimeSampledPath(int level)>& sample, double p,
                                 double tolerance = 0.01, int max_levels = 8);

/// Exhaustive enumeration over all sample subsets; at most 16 samples.
double vp_norm_bruteforce(const TimeSampledPath& path, double p);

/// Pairwise L^2 distances, with the tail as an extra zero sample when requested.
Eigen::MatrixXd pairwise_distances(const TimeSampledPath& path);

/// Step path a = sum_k chi_{[t_{k-1}, t_k)} phi_{k-1}, zero outside [t_0, t_K).
struct StepAtom {
  std::vector<double> times;  // t_0 < ... < t_K
  std::vector<Field> steps;   // phi_0, ..., phi_{K-1}

  /// Value at time t.
  Field at(double t, const FrequencyGrid& grid) const;
};

/// A U^p atom needs phi_0 = 0 and sum ||phi_k||^p = 1.
bool is_valid_atom(const StepAtom& atom, double p, double tol = 1e-9);

struct AtomicDecomposition {
  double p = 2;
  std::vector<std::complex<double>> weights;
  std::vector<StepAtom> atoms;

  /// sum_j lambda_j a_j sampled at the given times.
  TimeSampledPath sample(const std::vector<double>& times, const FrequencyGrid& grid, bool tail = false) const;
};

/// sum |lambda_j|, an upper bound for the U^p norm. Rejects invalid atoms.
double up_upper_bound(const AtomicDecomposition& decomposition);

/// Single-atom decomposition of the step path that takes value v_k on [t_k, t_{k+1}),
/// vanishing from the last sample on. Needs v_0 = 0.
AtomicDecomposition canonical_decomposition(const TimeSampledPath& step_path, double p);

/// B(u, v) = sum_k <u(t_{k-1}), v(t_k) - v(t_{k-1})> over the common sample grid,
/// plus <u(t_K), -v(t_K)> when v carries the tail convention.
std::complex<double> duality_pairing(const TimeSampledPath& u, const TimeSampledPath& v);

/// max over probes of |B(u, v)| / ||v||_{V^2}, a lower bound for ||u||_{U^2}.
double u2_lower_bound(const TimeSampledPath& u, const std::vector<TimeSampledPath>& probes);

/// Random probe paths on u's time grid, band-limited to [lo, hi).
std::vector<TimeSampledPath> random_probes(const TimeSampledPath& u, int count, std::mt19937_64& rng,
                                           double lo, double hi);

/// Frames untwisted by the free flow, e^{-it Delta} u(t): the path behind V^p_Delta.
TimeSampledPath adapted_path(const SpaceTimeField<double>& field, bool tail = false);

}  // namespace nlslab
