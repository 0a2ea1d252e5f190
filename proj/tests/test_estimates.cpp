#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "nlslab/data.hpp"
#include "nlslab/estimates.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/norms.hpp"
#include "test_util.hpp"

using namespace nlslab;
using testutil::rel_err;

namespace {

Field box(const FrequencyGrid& g, double a, double b) {
  return Field::from_spectrum(g, [=](double x) { return (x >= a && x < b) ? 1.0 : 0.0; });
}

// Continuum int_R Phi(1 / (k ln^3(2 + |eta|))) d eta by a plain trapezoid in y = ln(2 + |eta|).
double log_decay_integral_oracle(const YoungFunction& phi, double k) {
  const double a = std::log(2.0), b = 400.0;
  const int n = 400000;
  const double h = (b - a) / n;
  double sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double y = a + i * h;
    const double v = std::exp(y + phi.log_value(1 / (k * y * y * y)));
    sum += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return 2 * sum * h;
}

}  // namespace

TEST_CASE("data families") {
  FrequencyGrid g(512, 8);
  const Field flat = generate_data(g, DataSpec{.family = Family::flat_band, .band_lo = 0, .band_hi = 1});
  for (Eigen::Index s = 0; s < flat.size(); ++s)
    CHECK(flat.coeffs()[s] == std::complex<double>((flat.xi(s) >= 0 && flat.xi(s) < 1) ? 1.0 : 0.0));

  const DataSpec noisy{.family = Family::random_phase, .band_lo = -3, .band_hi = 5, .random_amplitude = true, .seed = 9};
  const Field a = generate_data(g, noisy), b = generate_data(g, noisy);
  CHECK((a - b).coeffs().norm() == 0);
  // Draws are keyed per unit block, so a finer grid sees the same function of xi.
  const Field fine = generate_data(FrequencyGrid(1024, 16), noisy);
  CHECK(std::abs(fine.at(2 * 13) - a.at(13)) < 1e-15);
  CHECK(std::abs(fine.at(2 * 13 + 1) - a.at(13)) < 1e-15);
  CHECK((generate_data(g, DataSpec{.family = Family::random_phase, .band_lo = -3, .band_hi = 5, .seed = 10}) - a)
            .coeffs()
            .norm() > 0);

  CHECK_THROWS_AS(generate_data(g, DataSpec{.family = Family::gaussian, .width = 0.05}), PreconditionError);
  CHECK_THROWS_AS(generate_data(g, DataSpec{.family = Family::flat_band, .band_lo = 0, .band_hi = 20}),
                  PreconditionError);
  CHECK_THROWS_AS(parse_family("sawtooth"), PreconditionError);
  CHECK(parse_family("log_decay") == Family::log_decay);
  for (const auto& f : {flat, a}) CHECK(margin_fraction(f) >= 0.9999);
}

TEST_CASE("power decay data against the integral") {
  // ||u0||_{L^hat r} = ||u0_hat||_{L^{r'}}; with beta = 1, r' = 2 and the hard cut at K:
  // int_{-K}^{K} (1 + |xi|)^{-2} = 2 (1 - 1 / (1 + K)).
  for (int m : {8, 32}) {
    FrequencyGrid g(64 * m, m);
    const double K = 0.25 * g.num_modes() * g.mode_spacing();
    const Field u = generate_data(g, DataSpec{.family = Family::power_decay, .beta = 1});
    const double exact = std::sqrt(2 * (1 - 1 / (1 + K)));
    CHECK(rel_err(fourier_lebesgue_norm(u, 2.0), exact) < 1.0 / m);
  }
}

TEST_CASE("log decay data: L^hat r grows, l^Phi L^2 settles") {
  const auto phi = YoungFunction::standard_instance(3, 0);
  std::vector<double> lhat, orlicz;
  for (int N : {1024, 2048, 4096, 8192}) {
    const Field u = generate_data(FrequencyGrid(N, 8), DataSpec{.family = Family::log_decay, .gamma = 3});
    lhat.push_back(fourier_lebesgue_norm(u, kInf));
    orlicz.push_back(modulation_orlicz_norm(u, phi));
  }
  // The L^1 mass of the spectrum grows like K / ln^3 K: each doubling multiplies it by a factor
  // that creeps up towards 2.
  for (std::size_t i = 1; i < lhat.size(); ++i) CHECK(lhat[i] > 1.1 * lhat[i - 1]);
  for (std::size_t i = 2; i < lhat.size(); ++i) CHECK(lhat[i] / lhat[i - 1] >= lhat[i - 1] / lhat[i - 2]);
  // Successive changes shrink and the last ones are below 1%.
  CHECK(rel_err(orlicz[3], orlicz[2]) < 0.01);
  CHECK(rel_err(orlicz[2], orlicz[1]) < 0.01);
  CHECK(rel_err(orlicz[3], orlicz[2]) < rel_err(orlicz[1], orlicz[0]));
}

TEST_CASE("power law fit and report plumbing") {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3 * std::pow(v, -0.5));
  const auto fit = fit_power_law(x, y);
  CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK_THROWS_AS(fit_power_law({1}, {1}), PreconditionError);

  EstimateReport r;
  r.predicted_exponent = 0.5;
  r.fit = PowerFit{0.6, 0, 0.01};
  r.checks.push_back(make_check("ok", 1, "<=", 2));
  set_growth_verdict(r);
  CHECK(r.verdict == Verdict::growth_consistent);
  r.fit->exponent = 0.7;
  set_growth_verdict(r);
  CHECK(r.verdict == Verdict::violated);
  r.fit->residual = 0.5;
  set_growth_verdict(r);
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK_FALSE(r.passed());
  r.checks.push_back(make_check("nan", std::nan(""), "<=", 1));
  CHECK_FALSE(r.checks.back().passed);
  set_bounded_verdict(r);
  CHECK(r.verdict == Verdict::violated);

  EstimateParams params;
  CHECK_NOTHROW(params.validate());
  params.theta = 1;
  CHECK_THROWS_AS(params.validate(), PreconditionError);
}

TEST_CASE("work queue keeps parameter order") {
  for (unsigned threads : {1u, 4u}) {
    auto squares = parallel_map<int>(100, [](std::size_t i) { return static_cast<int>(i * i); }, threads);
    for (std::size_t i = 0; i < squares.size(); ++i) CHECK(squares[i] == static_cast<int>(i * i));
    CHECK_THROWS_AS(parallel_map<int>(
                        10, [](std::size_t i) -> int { if (i == 3) throw std::runtime_error("x"); return 0; }, threads),
                    std::runtime_error);
  }
}

TEST_CASE("strichartz") {
  CHECK_THROWS_WITH_AS(check_admissible(6, 4), doctest::Contains("2/p + 1/q = 1/2"), PreconditionError);
  CHECK_THROWS_AS(check_admissible(2, kInf), PreconditionError);
  CHECK_NOTHROW(check_admissible(kInf, 2));
  CHECK_NOTHROW(check_admissible(8, 4));

  StrichartzOptions o;
  o.random_fields = 2;
  const auto report = verify_strichartz(o);
  CHECK(report.passed());
  CHECK(report.verdict == Verdict::bounded);
  // Gaussian: |e^{it Delta} e^{-x^2/2}| = (1+4t^2)^{-1/4} exp(-x^2/(2(1+4t^2))), so
  // int_0^1 ||u||_6^6 = sqrt(pi/3) atan(2) / 2 and ||u0||_2 = pi^{1/4}.
  const double exact = std::pow(std::sqrt(std::numbers::pi / 3) * std::atan(2.0) / 2, 1.0 / 6) / std::pow(std::numbers::pi, 0.25);
  CHECK(rel_err(report.ratios[0], exact) < 2e-3);

  o.p = kInf;
  o.q = 2;
  for (double r : verify_strichartz(o).ratios) CHECK(r == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("bilinear kernel") {
  FrequencyGrid g(1024, 16);
  const int m = g.modes_per_unit();
  const Field u0 = box(g, 0, 1), v0 = box(g, 3, 4);
  std::vector<double> xis;
  for (double xi = -4; xi <= 1; xi += 0.125) xis.push_back(xi);

  // t = 0: plain convolution.
  CHECK(verify_bilinear_kernel(u0, v0, {0.0}, xis) <= 1e-10);

  // t = 0.7 against the geometric series: the sum over lattice l with l in [3m, 4m), j + l in [0, m)
  // of exp(-it xi_j^2 - 2it xi_j xi_l) (dxi / sqrt(2 pi)).
  const double t = 0.7;
  const Field product = bilinear_product_spectrum(u0, v0, t);
  double worst = 0, scale = product.coeffs().cwiseAbs().maxCoeff();
  for (double xi : xis) {
    const int j = static_cast<int>(std::lround(xi * m));
    const int la = std::max(3 * m, -j), lb = std::min(4 * m - 1, m - 1 - j);
    std::complex<double> expected = 0;
    if (la <= lb) {
      const double x = xi;
      const std::complex<double> q = std::polar(1.0, -2 * t * x / m);
      const std::complex<double> series =
          std::abs(q - 1.0) < 1e-15 ? std::complex<double>(lb - la + 1)
                                    : (std::pow(q, la) - std::pow(q, lb + 1)) / (1.0 - q);
      expected = std::polar(1.0, -t * x * x) * series * (1.0 / m / std::sqrt(2 * std::numbers::pi));
    }
    worst = std::max(worst, std::abs(product.at(j) - expected) / scale);
  }
  CHECK(worst <= 1e-6);
  CHECK(verify_bilinear_kernel(u0, v0, {t, 1.3}, xis) <= 1e-6);

  // Far-separated bands: the product lives on the difference set (-11, -9].
  const Field w0 = box(g, 10, 11);
  const Field far = bilinear_product_spectrum(u0, w0, 0.4);
  const double top = far.coeffs().cwiseAbs().maxCoeff();
  for (Eigen::Index s = 0; s < far.size(); ++s)
    if (far.xi(s) <= -11 || far.xi(s) > -9 + 1e-12) CHECK(std::abs(far.coeffs()[s]) < 1e-12 * top);
}

TEST_CASE("bilinear identity and sweep") {
  // Lattice value against the continuum int_0^1 int_10^11 1 / (2 (b - a)) = (11 ln 11 - 20 ln 10 + 9 ln 9) / 2.
  FrequencyGrid g(2048, 64);
  const double continuum = 0.5 * (11 * std::log(11.0) - 20 * std::log(10.0) + 9 * std::log(9.0));
  CHECK(rel_err(bilinear_identity(box(g, 0, 1), box(g, 10, 11), 0), continuum) < 1e-3);
  CHECK(bilinear_identity(box(g, 0, 1), box(g, 10, 11), 11.5) == 0);

  BilinearOptions o;
  o.lambdas = {8, 32, 128};
  const auto report = verify_bilinear_inequality(o);
  CHECK(report.passed());
  CHECK(report.verdict == Verdict::growth_consistent);
  REQUIRE(report.fit);
  CHECK(report.fit->exponent <= -0.4);
  CHECK(report.fit->exponent >= -0.6);
}

TEST_CASE("graded L4 quadrature") {
  // Against a fine uniform Riemann sum on a small band.
  FrequencyGrid g(256, 8);
  const Field u0 = box(g, -2, 2);
  const double graded = free_l4_fourth_power(u0, 1.0);
  CHECK(rel_err(graded, free_l4_fourth_power(u0, 1.0, 16)) < 1e-6);
  const auto traj = free_trajectory(u0, 1.0, 20000);
  double riemann = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double v = std::pow(lebesgue_norm(traj.frame(k), 4.0), 4);
    riemann += (k == 0 || k + 1 == traj.size()) ? 0.5 * v : v;
  }
  riemann *= traj.dt();
  CHECK(rel_err(graded, riemann) < 1e-5);

  // Short times: ||u0||_4^4 for the flat band [-n/2, n/2) is n^3 / (3 pi) on the line.
  for (int n : {4, 16}) {
    const Field f = generate_data(restriction_grid(n), DataSpec{.family = Family::flat_band, .band_lo = -n / 2.0,
                                                                .band_hi = n / 2.0});
    const double h = 1e-9;
    CHECK(rel_err(free_l4_fourth_power(f, h) / h, n * n * n / (3 * std::numbers::pi)) < 1e-2);
  }

  // Refinement of the torus leaves R alone.
  const DataSpec flat{.family = Family::flat_band, .band_lo = -4, .band_hi = 4};
  const double coarse = restriction_ratio(generate_data(FrequencyGrid(128, 8), flat));
  const double refined = restriction_ratio(generate_data(FrequencyGrid(512, 32), flat));
  CHECK(rel_err(coarse, refined) < 1e-3);
}

TEST_CASE("restriction sweep") {
  RestrictionOptions o;
  o.sizes = {4, 8, 16, 32};
  o.seeds = 3;
  const auto report = verify_restriction_L4(o);
  CHECK(report.passed());
  for (std::size_t i = 1; i < report.ratios.size(); ++i) CHECK(report.ratios[i] > report.ratios[i - 1]);
  // Single block: R is the plain L^4 ratio.
  const Field one = box(FrequencyGrid(256, 8), 0, 1);
  CHECK(rel_err(restriction_ratio(one), std::pow(free_l4_fourth_power(one, 1.0), 0.25) / one.l2_norm()) < 1e-12);
}

TEST_CASE("embeddings") {
  const auto report = verify_embeddings({});
  CHECK(report.passed());
  CHECK(report.find_check("modulation_constant")->value <= 1 + 1e-9);
  CHECK(report.find_check("atomic_linf_l2")->value <= 1 + 1e-9);
}

TEST_CASE("scaling law") {
  const auto phi = YoungFunction::standard_instance(3, 0);
  for (double L : {0.0, 8.0}) {
    const double k = log_decay_orlicz_norm(phi, 3, 1.0, L);
    CHECK(rel_err(std::exp(L) * log_decay_integral_oracle(phi, k), 1.0) < 1e-5);
  }
  // Homogeneity in the amplitude.
  CHECK(rel_err(log_decay_orlicz_norm(phi, 3, 5.0, 2.0), 5 * log_decay_orlicz_norm(phi, 3, 1.0, 2.0)) < 1e-9);
  CHECK_THROWS_AS(log_decay_orlicz_norm(YoungFunction::standard_instance(3, 1), 3, 1.0, 1.0), PreconditionError);

  const auto report = verify_scaling_law({});
  CHECK(report.passed());
  CHECK(report.find_check("sharpness_lower")->passed);
}

TEST_CASE("norm persistence") {
  PersistenceOptions o;
  o.N = 512;
  o.steps = 500;
  const auto report = verify_norm_persistence(o);
  CHECK(report.passed());
  CHECK(report.ratios.front() == doctest::Approx(1).epsilon(1e-12));
  o.zero_data = true;
  const auto zero = verify_norm_persistence(o);
  CHECK(zero.passed());
  CHECK(zero.ratios.empty());
}
