#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/evolution.hpp"
#include "nlslab/variation.hpp"
#include "test_util.hpp"

using namespace nlslab;
using testutil::rel_err;

namespace {

const FrequencyGrid kGrid(64, 2);

std::vector<double> uniform_times(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = 0.1 * k;
  return t;
}

TimeSampledPath random_path(std::mt19937_64& rng, std::size_t n, bool tail) {
  std::vector<Field> values;
  for (std::size_t k = 0; k < n; ++k) values.push_back(testutil::random_field(kGrid, rng, -2, 2));
  return TimeSampledPath(uniform_times(n), values, tail);
}

Field scalar_field(double value) {
  Field f(kGrid);
  f.at(0) = value * std::sqrt(2.0);  // dxi = 1/2, so ||f|| = |value|
  return f;
}

// Random step path starting at 0, as canonical atoms expect.
TimeSampledPath random_step_path(std::mt19937_64& rng, std::size_t n) {
  auto path = random_path(rng, n, false);
  path.values.front() = Field(kGrid);
  return path;
}

}  // namespace

TEST_CASE("vp norm on simple paths") {
  std::vector<Field> constant(6, scalar_field(1.3));
  CHECK(vp_norm(TimeSampledPath(uniform_times(6), constant), 2) == 0);
  CHECK(rel_err(vp_norm(TimeSampledPath(uniform_times(6), constant, true), 2), 1.3) < 1e-14);

  const int M = 9;
  std::vector<Field> ramp;
  for (int k = 0; k <= M; ++k) ramp.push_back(scalar_field(k));
  CHECK(rel_err(vp_norm(TimeSampledPath(uniform_times(M + 1), ramp), 2), M) < 1e-13);

  std::mt19937_64 rng(1);
  auto phi = testutil::random_field(kGrid, rng), psi = testutil::random_field(kGrid, rng);
  for (double p : {1.0, 2.0, 3.5})
    CHECK(rel_err(vp_norm_bruteforce(TimeSampledPath({0.0, 1.0}, {phi, psi}), p), (psi - phi).l2_norm()) < 1e-14);
  CHECK(vp_norm_bruteforce(TimeSampledPath(uniform_times(6), constant), 2) == 0);
  CHECK_THROWS_AS(vp_norm_bruteforce(random_path(rng, 17, false), 2), PreconditionError);
  CHECK(vp_norm(TimeSampledPath({0.0}, {phi}), 2) == 0);
}

TEST_CASE("dynamic programming equals exhaustive enumeration") {
  std::mt19937_64 rng(2);
  int instance = 0;
  for (std::size_t n : {4u, 8u, 12u})
    for (int trial = 0; trial < 34; ++trial, ++instance) {
      const double p = 1.0 + (instance % 4) * 0.5;
      auto path = random_path(rng, n, instance % 2 == 1);
      CHECK(vp_norm(path, p) == vp_norm_bruteforce(path, p));
    }
}

TEST_CASE("vp norm monotonicity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto path = random_path(rng, 12, trial % 2 == 0);
    double prev = 1e300;
    for (double p : {1.0, 1.5, 2.0, 3.0, 6.0}) {
      const double v = vp_norm(path, p);
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
    }
    // Refinement: dropping samples never increases the value.
    TimeSampledPath coarse({}, {}, path.tail);
    for (std::size_t k = 0; k < path.size(); k += 2) {
      coarse.times.push_back(path.times[k]);
      coarse.values.push_back(path.values[k]);
    }
    CHECK(vp_norm(coarse, 2) <= vp_norm(path, 2) * (1 + 1e-12));
  }
}

TEST_CASE("atomic upper bounds") {
  std::mt19937_64 rng(4);
  auto phi = testutil::random_field(kGrid, rng);
  phi *= 1 / phi.l2_norm();
  StepAtom atom{{0.0, 0.5, 1.0}, {Field(kGrid), phi}};
  CHECK(is_valid_atom(atom, 2));
  AtomicDecomposition single{2, {1.0}, {atom}};
  CHECK(up_upper_bound(single) == 1);
  StepAtom bad{{0.0, 0.5}, {phi}};
  CHECK_FALSE(is_valid_atom(bad, 2));
  CHECK_THROWS_AS(up_upper_bound(AtomicDecomposition{2, {1.0}, {bad}}), PreconditionError);

  const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  for (double p : {1.5, 2.0, 4.0}) {
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      auto path = random_step_path(rng, 8);
      auto decomposition = canonical_decomposition(path, p);
      const double bound = up_upper_bound(decomposition);
      const auto resampled = decomposition.sample(path.times, kGrid);
      for (std::size_t k = 0; k < path.size(); ++k)
        CHECK((resampled.values[k] - path.values[k]).l2_norm() <= 1e-12 * bound);
      // Minkowski on increments gives ||u||_{V^p} <= 2 sum |lambda_j|.
      const double v = vp_norm(path, p);
      CHECK(v <= 2 * bound * (1 + 1e-12));
      worst = std::max(worst, v / bound);
    }
    CHECK(worst > 0);
  }
}

TEST_CASE("duality pairing") {
  std::mt19937_64 rng(5);
  auto u = random_path(rng, 5, false);
  std::vector<Field> constant(5, testutil::random_field(kGrid, rng));
  CHECK(std::abs(duality_pairing(u, TimeSampledPath(u.times, constant))) == 0);

  auto phi = testutil::random_field(kGrid, rng);
  const TimeSampledPath atom({0.0, 1.0, 2.0}, {phi, Field(kGrid), Field(kGrid)});
  // <phi, 0 - phi> + <0, 0 - 0> = -||phi||^2
  CHECK(std::abs(duality_pairing(atom, atom) + std::pow(phi.l2_norm(), 2)) < 1e-12 * std::pow(phi.l2_norm(), 2));

  CHECK_THROWS_AS(duality_pairing(u, random_path(rng, 6, false)), PreconditionError);

  // Sandwich: duality lower bound never exceeds the atomic upper bound.
  for (int trial = 0; trial < 20; ++trial) {
    for (bool tail : {false, true}) {
      auto path = random_step_path(rng, 6);
      path.tail = tail;
      auto decomposition = canonical_decomposition(path, 2.0);
      const double upper = up_upper_bound(decomposition);
      const double lower = u2_lower_bound(path, random_probes(path, 50, rng, -2, 2));
      CHECK(lower <= upper * (1 + 1e-12));
      // The path itself (negated increments) is a good probe.
      CHECK(lower > 0);
    }
  }
}

TEST_CASE("adapted paths") {
  FrequencyGrid g(256, 8);
  std::mt19937_64 rng(6);
  auto u0 = testutil::random_field(g, rng, -3, 3);
  auto free = free_trajectory(u0, 1.0, 20);
  CHECK(vp_norm(adapted_path(free), 2) < 1e-12 * u0.l2_norm());

  auto forced = splitstep_evolve(std::complex<double>(2.0) * u0, EvolutionConfig{0.2, 200, 10});
  CHECK(vp_norm(adapted_path(forced), 2) > 1e-3);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Field> frames;
    for (int k = 0; k < 12; ++k) frames.push_back(testutil::random_field(g, rng, -4, 4));
    auto field = SpaceTimeField<double>::uniform(g, 0, 1, frames);
    double blocks = 0;
    for (int i = -2; i < 3; ++i) {
      std::vector<Field> proj;
      for (const auto& f : frames) proj.push_back(project_block(f, i));
      blocks += std::pow(vp_norm(adapted_path(SpaceTimeField<double>::uniform(g, 0, 1, proj)), 2), 2);
    }
    std::vector<Field> band;
    for (const auto& f : frames) band.push_back(project_band(f, -2, 3));
    const double whole = std::pow(vp_norm(adapted_path(SpaceTimeField<double>::uniform(g, 0, 1, band)), 2), 2);
    CHECK(whole <= blocks + 1e-9);
  }
}

TEST_CASE("refinement converges to the continuum variation from below") {
  // f(t) = sin(6 pi t) on [0, 1]: extremal partition at the extrema, two quarter swings of
  // size 1 and five half swings of size 2, so V^2 = sqrt(2 + 5 * 4) = sqrt(22).
  auto sampled = [](int points) {
    return [points](int level) {
      const int n = points * (1 << level);
      std::vector<double> times;
      std::vector<Field> values;
      for (int k = 0; k <= n; ++k) {
        times.push_back(static_cast<double>(k) / n);
        values.push_back(scalar_field(std::sin(6 * M_PI * times.back())));
      }
      return TimeSampledPath(times, values);
    };
  };
  const auto hits = vp_norm_refined(sampled(12), 2.0);
  CHECK(hits.converged);
  CHECK(hits.levels == 2);
  CHECK(rel_err(hits.value, std::sqrt(22.0)) < 1e-12);

  const auto misses = vp_norm_refined(sampled(5), 2.0);
  CHECK(misses.converged);
  CHECK(misses.last_change < 0.01);
  CHECK(misses.value <= std::sqrt(22.0) * (1 + 1e-12));
  CHECK(misses.value > 0.98 * std::sqrt(22.0));
  CHECK(vp_norm(sampled(5)(0), 2.0) < misses.value);
}
