#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/evolution.hpp"
#include "test_util.hpp"

using namespace nlslab;
using testutil::rel_err;

namespace {

double field_rel_err(const Field& a, const Field& b) {
  const double scale = std::max(a.l2_norm(), b.l2_norm());
  return scale == 0 ? 0.0 : (a - b).l2_norm() / scale;
}

double trajectory_rel_err(const SpaceTimeField<double>& a, const SpaceTimeField<double>& b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, field_rel_err(a.frame(k), b.frame(k)));
  return worst;
}

Field gaussian(const FrequencyGrid& g, double amplitude = 1.0) {
  return sample_physical<double>(g, [=](double x) { return amplitude * std::exp(-0.5 * x * x); });
}

}  // namespace

TEST_CASE("free flow is a unitary group commuting with projections") {
  FrequencyGrid g(512, 8);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = testutil::random_field(g, rng, -10, 10);
    CHECK(field_rel_err(free_evolve(u, 0.0), u) == 0);
    for (double t : {0.1, 1.0, 10.0}) CHECK(rel_err(free_evolve(u, t).l2_norm(), u.l2_norm()) < 1e-12);
    CHECK(field_rel_err(free_evolve(free_evolve(u, 0.3), 1.7), free_evolve(u, 2.0)) < 1e-12);
    CHECK(field_rel_err(free_evolve(project_band(u, -1.5, 2.25), 0.8), project_band(free_evolve(u, 0.8), -1.5, 2.25)) <
          1e-12);
  }
}

TEST_CASE("galilean covariance of the free flow") {
  FrequencyGrid g(512, 8);
  std::mt19937_64 rng(10);
  auto u0 = testutil::random_field(g, rng, -3, 3);
  CHECK(field_rel_err(galilean_boost(u0, 0.0), u0) == 0);
  CHECK_THROWS_AS(galilean_boost(u0, 0.3), PreconditionError);
  for (double c : {1.0, -2.5, 4.125}) {
    auto boosted = free_trajectory(galilean_boost(u0, c), 1.0, 20);
    auto reference = galilean_reference(free_trajectory(u0, 1.0, 20), c);
    CHECK(trajectory_rel_err(boosted, reference) < 1e-10);
  }
}

TEST_CASE("galilean covariance of nonlinear solutions") {
  FrequencyGrid g(512, 8);
  auto u0 = gaussian(g, 1.5);
  EvolutionConfig cfg{0.5, 500, 10};
  for (double c : {1.0, 3.0}) {
    auto boosted = splitstep_evolve(galilean_boost(u0, c), cfg);
    auto reference = galilean_reference(splitstep_evolve(u0, cfg), c);
    CHECK(trajectory_rel_err(boosted, reference) < 1e-5);
  }
}

TEST_CASE("rescale") {
  FrequencyGrid g(512, 8);
  std::mt19937_64 rng(12);
  auto u = testutil::random_field(g, rng, -3, 3);
  CHECK(field_rel_err(rescale(u, 1.0), u) == 0);
  CHECK_THROWS_AS(rescale(u, 3.0), PreconditionError);
  CHECK_THROWS_AS(rescale(u, 16.0), PreconditionError);
  auto v = rescale(u, 4.0);
  CHECK(v.grid().modes_per_unit() == 2);
  CHECK(rel_err(v.l2_norm(), 2 * u.l2_norm()) < 1e-10);
}

TEST_CASE("split-step conserves mass and has second order energy drift") {
  FrequencyGrid g(1024, 8);
  SUBCASE("zero data") {
    auto traj = splitstep_evolve(Field(g), EvolutionConfig{1.0, 100});
    for (const auto& f : traj.frames()) CHECK(f.coeffs().norm() == 0);
  }
  SUBCASE("mass") {
    auto u0 = gaussian(g, 2.0);
    auto traj = splitstep_evolve(u0, EvolutionConfig{1.0, 1000, 100});
    CHECK(std::abs(mass(traj.frames().back()) - mass(u0)) / mass(u0) <= 1e-10);
  }
  SUBCASE("energy order") {
    auto u0 = gaussian(g, 2.0);
    const double e0 = energy(u0);
    std::vector<double> drift;
    for (int steps : {100, 200, 400}) {
      auto traj = splitstep_evolve(u0, EvolutionConfig{1.0, steps, steps / 10});
      double worst = 0;
      for (const auto& f : traj.frames()) worst = std::max(worst, std::abs(energy(f) - e0));
      drift.push_back(worst);
    }
    for (std::size_t i = 1; i < drift.size(); ++i) {
      const double factor = drift[i - 1] / drift[i];
      CHECK(factor >= 3.5);
      CHECK(factor <= 4.5);
    }
  }
}

TEST_CASE("duhamel quadrature") {
  FrequencyGrid g(256, 8);
  std::mt19937_64 rng(13);
  auto gfield = testutil::random_field(g, rng, -2, 2);

  auto zero = duhamel_apply(SpaceTimeField<double>::uniform(g, 0, 1, std::vector<Field>(11, Field(g))));
  for (const auto& f : zero.frames()) CHECK(f.coeffs().norm() == 0);

  const auto wave = free_trajectory(gfield, 1.0, 1000);
  const auto integral = duhamel_apply(wave);
  for (std::size_t k = 0; k < wave.size(); k += 100) {
    const double t = wave.times()[k];
    CHECK(field_rel_err(integral.frame(k), std::complex<double>(t) * wave.frame(k)) <= 1e-6 + (t == 0 ? 1 : 0));
  }

  // u(t) = a(t) e^{it Delta} g solves i u_t + u_xx = i a'(t) e^{it Delta} g.
  auto a = [](double t) { return std::cos(2 * t) + t * t; };
  auto da = [](double t) { return -2 * std::sin(2 * t) + 2 * t; };
  std::vector<Field> forcing;
  for (std::size_t k = 0; k < wave.size(); ++k)
    forcing.push_back(std::complex<double>(0, da(wave.times()[k])) * wave.frame(k));
  const auto d = duhamel_apply(SpaceTimeField<double>(g, wave.times(), forcing));
  double worst = 0;
  for (std::size_t k = 0; k < wave.size(); ++k) {
    const Field rebuilt = std::complex<double>(a(0)) * wave.frame(k) + std::complex<double>(0, -1) * d.frame(k);
    const Field exact = std::complex<double>(a(wave.times()[k])) * wave.frame(k);
    worst = std::max(worst, (rebuilt - exact).l2_norm() / gfield.l2_norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("picard iteration") {
  FrequencyGrid g(256, 8);
  PicardOptions opts;
  opts.steps = 1000;
  opts.iterations = 6;

  auto zero = picard_iterate(Field(g), opts, modulation_monitor<double>(4));
  for (double d : zero.differences) CHECK(d == 0);
  for (const auto& f : zero.final_iterate.frames()) CHECK(f.coeffs().norm() == 0);

  auto u0 = gaussian(g);
  u0 *= 0.1 / modulation_norm(u0, 4);
  opts.keep_iterates = true;
  auto result = picard_iterate(u0, opts, modulation_monitor<double>(4));
  CHECK(trajectory_rel_err(result.iterates.front(), free_trajectory(u0, 1.0, 1000)) == 0);
  CHECK_FALSE(result.diverged);
  for (double r : result.ratios) CHECK(r < 1);
  auto reference = splitstep_evolve(u0, EvolutionConfig{1.0, 1000});
  double gap = 0;
  for (std::size_t k = 0; k < reference.size(); ++k)
    gap = std::max(gap, modulation_norm(result.final_iterate.frame(k) - reference.frame(k), 4.0));
  CHECK(gap <= 1e-4);
  CHECK(result.coefficient == doctest::Approx(1 + 1 + 1).epsilon(1e-12));

  // Contraction ratio grows with the horizon.
  double previous = 0;
  for (double horizon : {0.25, 0.5, 1.0}) {
    PicardOptions o;
    o.horizon = horizon;
    o.steps = static_cast<int>(1000 * horizon);
    o.iterations = 3;
    auto r = picard_iterate(u0, o, modulation_monitor<double>(4));
    CHECK(r.ratios.front() >= previous);
    previous = r.ratios.front();
  }
}
