#include "nlslab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "nlslab/evolution.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/variation.hpp"

namespace nlslab {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::growth_consistent: return "growth_consistent";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Check make_check(std::string name, double value, std::string relation, double threshold) {
  Check c{std::move(name), value, threshold, std::move(relation), false};
  if (c.relation == "<=") c.passed = value <= threshold;
  else if (c.relation == ">=") c.passed = value >= threshold;
  else if (c.relation == "==") c.passed = std::abs(value) <= threshold;  // value is an error
  else throw PreconditionError("make_check: unknown relation '" + c.relation + "'");
  if (std::isnan(value)) c.passed = false;
  return c;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_power_law: need two or more points");
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw PreconditionError("fit_power_law: data must be positive");
    A(i, 0) = 1;
    A(i, 1) = std::log(x[i]);
    b[i] = std::log(y[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  PowerFit fit;
  fit.intercept = coef[0];
  fit.exponent = coef[1];
  fit.residual = std::sqrt((A * coef - b).squaredNorm() / n);
  return fit;
}

bool EstimateReport::passed() const {
  if (verdict == Verdict::violated || verdict == Verdict::inconclusive) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* EstimateReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void set_bounded_verdict(EstimateReport& report) {
  const bool ok = std::all_of(report.checks.begin(), report.checks.end(), [](const Check& c) { return c.passed; });
  report.verdict = ok ? Verdict::bounded : Verdict::violated;
}

void set_growth_verdict(EstimateReport& report, double slack, double max_residual) {
  if (!report.fit) {
    report.verdict = Verdict::inconclusive;
    return;
  }
  const bool ok = std::all_of(report.checks.begin(), report.checks.end(), [](const Check& c) { return c.passed; });
  if (report.fit->residual > max_residual) report.verdict = Verdict::inconclusive;
  else if (ok && report.fit->exponent <= report.predicted_exponent + slack) report.verdict = Verdict::growth_consistent;
  else report.verdict = Verdict::violated;
}

void EstimateParams::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("estimate parameters: " + what);
  };
  require(theta > 0 && theta < 1, "theta must lie in (0, 1)");
  require(beta_log > 1, "beta_log must exceed 1");
  require(beta_decay > 0, "beta_decay must be positive");
  require(p >= 2, "p must be at least 2");
  require(gamma > 0, "gamma must be positive");
  require(T > 0, "T must be positive");
  require(!lambda_sweep.empty(), "lambda_sweep must not be empty");
  for (std::size_t i = 0; i < lambda_sweep.size(); ++i) {
    require(lambda_sweep[i] > 0, "lambda_sweep entries must be positive");
    if (i > 0) require(lambda_sweep[i] > lambda_sweep[i - 1], "lambda_sweep must increase");
  }
}

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

// Gauss-Legendre nodes and weights on [-1, 1], Newton on P_n.
struct GaussRule {
  std::vector<double> nodes, weights;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2 / ((1 - x * x) * dp * dp);
  }
  return rule;
}

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

// ---------------------------------------------------------------- strichartz

void check_admissible(double p, double q) {
  const double lhs = 2 / p + 1 / q;  // 2/inf = 0
  if (!(p >= 4) || !(q >= 2) || std::abs(lhs - 0.5) > 1e-12) {
    std::ostringstream os;
    os << "(p, q) = (" << p << ", " << q << ") is not admissible: need 2/p + 1/q = 1/2 with 4 <= p <= inf, got "
       << "2/p + 1/q = " << lhs;
    throw PreconditionError(os.str());
  }
}

EstimateReport verify_strichartz(const StrichartzOptions& o) {
  check_admissible(o.p, o.q);
  EstimateReport report;
  std::ostringstream id;
  id << "strichartz_p" << o.p << "_q" << o.q;
  report.id = id.str();
  report.sweep_name = "datum";
  report.predicted_law = "||e^{it Delta} u0||_{L^p L^q} <= C ||u0||_{L^2}";
  report.band = 2;
  report.grid = {{"N", o.N}, {"m", o.m}, {"T", o.T}, {"steps", o.steps}, {"refined_N", 2 * o.N}, {"refined_m", 2 * o.m}};

  std::vector<DataSpec> data;
  data.push_back(DataSpec{.family = Family::gaussian});
  data.push_back(DataSpec{.family = Family::flat_band, .band_lo = 0, .band_hi = 1});
  for (int i = 0; i < o.random_fields; ++i) {
    data.push_back(DataSpec{.family = Family::random_phase, .band_lo = -4, .band_hi = 4, .random_amplitude = true,
                            .seed = o.seed + i});
    report.seeds.push_back(o.seed + i);
  }

  const FrequencyGrid base(o.N, o.m), fine(2 * o.N, 2 * o.m);
  auto ratio = [&](const FrequencyGrid& g, const DataSpec& spec) {
    const Field u0 = generate_data(g, spec);
    return mixed_spacetime_norm(free_trajectory(u0, o.T, o.steps), o.p, o.q) / u0.l2_norm();
  };
  auto pairs = parallel_map<std::pair<double, double>>(
      data.size(), [&](std::size_t i) { return std::pair{ratio(base, data[i]), ratio(fine, data[i])}; }, o.threads);

  double worst_change = 1;
  for (std::size_t i = 0; i < data.size(); ++i) {
    report.sweep.push_back(static_cast<double>(i));
    report.ratios.push_back(pairs[i].first);
    const double change = std::max(pairs[i].first / pairs[i].second, pairs[i].second / pairs[i].first);
    worst_change = std::max(worst_change, change);
    report.notes.push_back(family_name(data[i].family) + (data[i].family == Family::random_phase
                                                              ? " seed " + std::to_string(data[i].seed)
                                                              : std::string()) +
                           ": ratio " + std::to_string(pairs[i].first) + " -> " + std::to_string(pairs[i].second));
  }
  report.checks.push_back(make_check("refinement_change", worst_change, "<=", 2.0));
  double finite = 1;
  for (double r : report.ratios) finite = std::isfinite(r) ? finite : 0;
  report.checks.push_back(make_check("ratios_finite", finite, ">=", 1));
  set_bounded_verdict(report);
  return report;
}

// ---------------------------------------------------------------- bilinear

std::complex<double> bilinear_kernel_direct(const Field& u0, const Field& v0, double t, double xi) {
  const auto& g = u0.grid();
  const int j = static_cast<int>(std::lround(xi * g.modes_per_unit()));
  std::complex<long double> sum = 0;
  for (int l = g.min_index(); l <= g.max_index(); ++l) {
    const int k = j + l;  // xi - xi_1 with xi_1 = -xi_l
    if (k < g.min_index() || k > g.max_index()) continue;
    const auto a = u0.at(k);
    const auto b = v0.at(l);
    if (a == 0.0 || b == 0.0) continue;
    const long double x = g.xi(j), x1 = -g.xi(l);
    const long double phase = std::fmod(-t * x * x + 2 * t * x * x1, 2 * std::numbers::pi_v<long double>);
    sum += std::polar(1.0L, phase) * std::complex<long double>(a) * std::conj(std::complex<long double>(b));
  }
  return std::complex<double>(sum) * (g.mode_spacing() / kSqrt2Pi);
}

Field bilinear_product_spectrum(const Field& u0, const Field& v0, double t) {
  const auto u = inverse_transform(free_evolve(u0, t));
  const auto v = inverse_transform(free_evolve(v0, t));
  const ComplexVector<double> w = u.cwiseProduct(v.conjugate());
  return forward_transform<double>(u0.grid(), w);
}

double verify_bilinear_kernel(const Field& u0, const Field& v0, const std::vector<double>& t_samples,
                              const std::vector<double>& xi_samples) {
  double worst = 0;
  for (double t : t_samples) {
    const Field product = bilinear_product_spectrum(u0, v0, t);
    const double scale = product.coeffs().cwiseAbs().maxCoeff();
    if (scale == 0) continue;
    for (double xi : xi_samples) {
      const int j = static_cast<int>(std::lround(xi * u0.grid().modes_per_unit()));
      worst = std::max(worst, std::abs(product.at(j) - bilinear_kernel_direct(u0, v0, t, xi)) / scale);
    }
  }
  return worst;
}

double bilinear_identity(const Field& u0, const Field& v0, double lambda) {
  const auto& g = u0.grid();
  double sum = 0;
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    const double a = std::norm(u0.coeffs()[i]);
    if (a == 0) continue;
    for (Eigen::Index j = 0; j < v0.size(); ++j) {
      const double b = std::norm(v0.coeffs()[j]);
      if (b == 0) continue;
      const double d = std::abs(g.xi_at_slot(i) - g.xi_at_slot(j));
      if (d > lambda) sum += a * b / (2 * d);
    }
  }
  return sum * g.mode_spacing() * g.mode_spacing();
}

double bilinear_windowed(const Field& u0, const Field& v0, double lambda, double window, double dt) {
  const int n = 2 * static_cast<int>(std::ceil(window / dt / 2));
  const double h = 2 * window / n;
  double sum = 0;
  for (int k = 0; k <= n; ++k) {
    const double t = -window + k * h;
    const double value = std::pow(project_high(bilinear_product_spectrum(u0, v0, t), lambda).l2_norm(), 2);
    sum += value * ((k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2));
  }
  return sum * h / 3;
}

EstimateReport verify_bilinear_inequality(const BilinearOptions& o) {
  EstimateReport report;
  report.id = "bilinear";
  report.sweep_name = "lambda";
  report.fit_abscissa = "lambda";
  report.predicted_law = "||P_{>lambda}(u vbar)||_{L^2 L^2} <= C lambda^{-1/2} ||u0||_{L^2} ||v0||_{L^2}";
  report.predicted_exponent = -0.5;
  report.grid = {{"identity_N", o.identity_N}, {"identity_m", o.identity_m}, {"identity_lambda", o.identity_lambda},
                 {"sweep_m", o.sweep_m}, {"window_scale", o.window_scale}};

  auto box = [](const FrequencyGrid& g, double a, double b) {
    return Field::from_spectrum(g, [=](double x) { return (x >= a && x < b) ? 1.0 : 0.0; });
  };

  // (a) windowed time integral against the frequency-side identity, window doubling.
  {
    const FrequencyGrid g(o.identity_N, o.identity_m);
    const Field u0 = box(g, 0, 1), v0 = box(g, o.identity_lambda, o.identity_lambda + 1);
    const double exact = bilinear_identity(u0, v0, o.identity_lambda);
    const double dt = 1.0 / (13 * (o.identity_lambda + 1));
    std::vector<double> windows, ratios;
    double window = o.first_window;
    int reached = -1;
    for (int d = 0; d <= o.max_doublings; ++d, window *= 2) {
      windows.push_back(window);
      ratios.push_back(bilinear_windowed(u0, v0, o.identity_lambda, window, dt) / exact);
      if (reached < 0 && ratios.back() >= 0.95) reached = d;
      if (reached >= 0 && d == reached + 2) break;
    }
    for (std::size_t i = 0; i < windows.size(); ++i)
      report.notes.push_back("identity: T_w " + std::to_string(windows[i]) + " windowed/identity " +
                             std::to_string(ratios[i]));
    report.checks.push_back(make_check("window_converged", reached >= 0 ? 1.0 : 0.0, ">=", 1));
    if (reached >= 0) {
      double worst = 0, monotone = 1;
      for (std::size_t i = reached; i < ratios.size(); ++i) {
        worst = std::max(worst, std::abs(ratios[i] - 1));
        if (i > static_cast<std::size_t>(reached) && ratios[i] < ratios[i - 1]) monotone = 0;
      }
      report.checks.push_back(make_check("identity_within_5pct", worst, "<=", 0.05));
      report.checks.push_back(make_check("identity_doublings", static_cast<double>(ratios.size() - 1 - reached), ">=", 2));
      report.checks.push_back(make_check("identity_from_below", monotone, ">=", 1));
    }
    // Empty region: lambda above every |xi_1 - xi_2|.
    report.checks.push_back(make_check("empty_region", bilinear_identity(u0, v0, o.identity_lambda + 2), "==", 0));
  }

  // (b) lambda sweep with separated unit bands.
  struct Row {
    double lhs, windowed, ratio;
  };
  auto rows = parallel_map<Row>(
      o.lambdas.size(),
      [&](std::size_t i) {
        const double lambda = o.lambdas[i];
        int N = 16 * o.sweep_m;
        while (N * (1.0 / o.sweep_m) / 4 < lambda + 3) N *= 2;
        const FrequencyGrid g(N, o.sweep_m);
        const Field u0 = box(g, 0, 1), v0 = box(g, lambda + 2, lambda + 3);
        const double identity = bilinear_identity(u0, v0, lambda);
        const double centre = lambda + 2.5;
        const double windowed = bilinear_windowed(u0, v0, lambda, o.window_scale / centre, 1.0 / (13 * (centre + 0.5)));
        const double lhs = std::sqrt(identity);
        return Row{lhs, windowed / identity, lhs / (std::pow(lambda, -0.5) * u0.l2_norm() * v0.l2_norm())};
      },
      o.threads);
  std::vector<double> lhs;
  double worst_window = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    report.sweep.push_back(o.lambdas[i]);
    report.ratios.push_back(rows[i].ratio);
    lhs.push_back(rows[i].lhs);
    worst_window = std::max(worst_window, std::abs(rows[i].windowed - 1));
    report.notes.push_back("sweep: lambda " + std::to_string(o.lambdas[i]) + " windowed/identity " +
                           std::to_string(rows[i].windowed));
  }
  report.fit_x = o.lambdas;
  report.fit_y = lhs;
  report.fit = fit_power_law(o.lambdas, lhs);
  report.checks.push_back(make_check("sweep_window_agreement", worst_window, "<=", 0.05));
  report.checks.push_back(make_check("exponent_upper", report.fit->exponent, "<=", -0.4));
  report.checks.push_back(make_check("exponent_lower", report.fit->exponent, ">=", -0.6));
  report.checks.push_back(make_check("ratio_spread", spread(report.ratios), "<=", 2));
  report.band = 2;
  set_growth_verdict(report, 0.1);
  return report;
}

// ---------------------------------------------------------------- restriction

double free_l4_fourth_power(const Field& u0, double horizon, int nodes_per_panel) {
  const auto rule = gauss_legendre(nodes_per_panel);
  // Band width sets the time scale of the initial concentration: ||u(t)||_4^4 is flat up to ~1/n^2,
  // then decays like 1/t. Panels [0, tau], [tau, 2 tau], [2 tau, 4 tau], ...
  double hi = 0;
  for (Eigen::Index s = 0; s < u0.size(); ++s)
    if (u0.coeffs()[s] != 0.0) hi = std::max(hi, std::abs(u0.xi(s)) + u0.dxi());
  const double tau = hi > 0 ? std::min(horizon, 1 / (4 * hi * hi)) : horizon;
  std::vector<double> breaks{0, tau};
  while (breaks.back() < horizon) breaks.push_back(std::min(horizon, 2 * breaks.back()));
  double sum = 0;
  for (std::size_t p = 1; p < breaks.size(); ++p) {
    const double a = breaks[p - 1], b = breaks[p];
    for (int i = 0; i < nodes_per_panel; ++i) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      sum += 0.5 * (b - a) * rule.weights[i] * std::pow(lebesgue_norm(free_evolve(u0, t), 4.0), 4);
    }
  }
  return sum;
}

FrequencyGrid restriction_grid(int n) {
  if (n < 1) throw PreconditionError("restriction_grid: |I| must be positive");
  int m = 8;
  while (m < n / 2) m *= 2;
  int N = 16;
  while (N < 2 * n * m || N < 16 * m) N *= 2;
  return FrequencyGrid(N, m);
}

double restriction_ratio(const Field& u0) {
  double sum4 = 0;
  for (const auto& b : unit_blocks(u0)) sum4 += std::pow(b.mass, 4);
  if (sum4 == 0) return 0;
  return std::pow(free_l4_fourth_power(u0, 1.0) / sum4, 0.25);
}

EstimateReport verify_restriction_L4(const RestrictionOptions& o) {
  EstimateReport report;
  report.id = "restriction_l4";
  report.sweep_name = "|I|";
  report.fit_abscissa = "ln|I|";
  report.predicted_law = "||P_I u||_{L^4([0,1] x R)} <= C sqrt(ln|I|) (sum_k ||u_{0,k}||^4)^{1/4}";
  report.predicted_exponent = 0.5;
  report.band = 2;
  for (int s = 0; s < o.seeds; ++s) report.seeds.push_back(o.first_seed + s);

  auto datum = [&](int n, int seed_index) {
    const FrequencyGrid g = restriction_grid(n);
    DataSpec spec{.band_lo = -n / 2.0, .band_hi = n / 2.0};
    if (seed_index < 0) {
      spec.family = Family::flat_band;
    } else {
      spec.family = Family::random_phase;
      spec.seed = o.first_seed + seed_index;
    }
    return restriction_ratio(generate_data(g, spec));
  };

  const std::size_t sizes = o.sizes.size();
  const std::size_t jobs = sizes * (1 + o.seeds);
  auto values = parallel_map<double>(
      jobs, [&](std::size_t i) { return datum(o.sizes[i % sizes], static_cast<int>(i / sizes) - 1); }, o.threads);

  std::vector<double> logs, normalized;
  for (std::size_t i = 0; i < sizes; ++i) {
    const double n = o.sizes[i];
    report.sweep.push_back(n);
    report.ratios.push_back(values[i]);
    logs.push_back(std::log(n));
    normalized.push_back(values[i] / std::sqrt(std::log(n)));
    report.grid["m_at_" + std::to_string(o.sizes[i])] = restriction_grid(o.sizes[i]).modes_per_unit();
    report.grid["N_at_" + std::to_string(o.sizes[i])] = restriction_grid(o.sizes[i]).num_modes();
  }
  report.fit_x = logs;
  report.fit_y = report.ratios;
  report.fit = fit_power_law(logs, report.ratios);
  report.checks.push_back(make_check("flat_normalized_spread", spread(normalized), "<=", 2));

  double worst = -INFINITY, worst_residual = 0;
  for (int s = 0; s < o.seeds; ++s) {
    std::vector<double> r(values.begin() + (s + 1) * sizes, values.begin() + (s + 2) * sizes);
    const auto fit = fit_power_law(logs, r);
    worst = std::max(worst, fit.exponent);
    worst_residual = std::max(worst_residual, fit.residual);
  }
  if (o.seeds > 0) {
    report.checks.push_back(make_check("ensemble_max_exponent", worst, "<=", 0.65));
    report.notes.push_back("ensemble: worst fit residual " + std::to_string(worst_residual));
  }
  set_growth_verdict(report);
  return report;
}

// ---------------------------------------------------------------- embeddings

EstimateReport verify_embeddings(const EmbeddingOptions& o) {
  EstimateReport report;
  report.id = "embeddings";
  report.sweep_name = "suite";
  report.predicted_law = "M_{2,p} <= L^hat^{p'} (constant 1); l^Phi L^2 <= C L^hat^Phi; L^inf L^2 <= U^p atomic bound";
  report.grid = {{"N", o.N}, {"m", o.m}, {"refined_N", 2 * o.N}, {"refined_m", 2 * o.m}, {"gamma", o.gamma}};
  report.seeds = {o.seed};
  std::mt19937_64 rng(o.seed);

  // Modulation: on each unit block, L^2 <= L^p by Hoelder on a set of measure 1.
  const FrequencyGrid g(o.N, o.m);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> unit(0, 1);
  double mod_worst = 0;
  for (int i = 0; i < o.samples; ++i) {
    Field u(g);
    const double lo = -6 + 4 * unit(rng), hi = lo + 1 + 8 * unit(rng);
    for (Eigen::Index s = 0; s < u.size(); ++s)
      if (u.xi(s) >= lo && u.xi(s) < hi) u.coeffs()[s] = {normal(rng), normal(rng)};
    for (double p : o.modulation_indices)
      mod_worst = std::max(mod_worst, modulation_norm(u, p) / fourier_lebesgue_norm(u, conjugate_exponent(p)));
  }
  report.sweep.push_back(0);
  report.ratios.push_back(mod_worst);
  report.checks.push_back(make_check("modulation_constant", mod_worst, "<=", 1 + 1e-9));

  // Orlicz: the same smooth spectra on two grids.
  const auto phi = YoungFunction::standard_instance(o.gamma, 0);
  const FrequencyGrid fine(2 * o.N, 2 * o.m);
  double c_base = 0, c_fine = 0;
  for (int i = 0; i < o.samples; ++i) {
    DataSpec spec{.family = Family::random_bumps, .seed = o.seed * 1000 + i};
    const Field a = generate_data(g, spec), b = generate_data(fine, spec);
    c_base = std::max(c_base, modulation_orlicz_norm(a, phi) / luxemburg_frequency_norm(a, phi));
    c_fine = std::max(c_fine, modulation_orlicz_norm(b, phi) / luxemburg_frequency_norm(b, phi));
  }
  report.sweep.push_back(1);
  report.ratios.push_back(c_base);
  report.notes.push_back("orlicz constant " + std::to_string(c_base) + " on the base grid, " + std::to_string(c_fine) +
                         " on the refined grid (Phi C = " + std::to_string(phi.C()) + ")");
  report.checks.push_back(make_check("orlicz_constant_stability", std::max(c_base / c_fine, c_fine / c_base), "<=", 2));

  // L^inf L^2 against sum |lambda_j| on exact atoms.
  const FrequencyGrid small(256, 8);
  std::vector<double> times(64);
  for (int k = 0; k < 64; ++k) times[k] = k / 63.0;
  double atom_worst = 0;
  for (int i = 0; i < o.samples; ++i) {
    AtomicDecomposition dec;
    dec.p = 2;
    const int atoms = 1 + i % 4;
    for (int a = 0; a < atoms; ++a) {
      const int steps = 2 + static_cast<int>(unit(rng) * 5);
      StepAtom atom;
      std::vector<double> cuts{0};
      for (int k = 0; k < steps; ++k) cuts.push_back(unit(rng));
      std::sort(cuts.begin() + 1, cuts.end());
      cuts.push_back(1.01);
      for (std::size_t k = 1; k < cuts.size(); ++k)
        if (cuts[k] <= cuts[k - 1]) cuts[k] = cuts[k - 1] + 1e-3;
      atom.times = cuts;
      atom.steps.push_back(Field(small));
      double total = 0;
      for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
        Field phi_k(small);
        for (Eigen::Index s = 0; s < phi_k.size(); ++s)
          if (std::abs(phi_k.xi(s)) < 3) phi_k.coeffs()[s] = {normal(rng), normal(rng)};
        total += std::pow(phi_k.l2_norm(), 2);
        atom.steps.push_back(std::move(phi_k));
      }
      for (std::size_t k = 1; k < atom.steps.size(); ++k) atom.steps[k] *= 1 / std::sqrt(total);
      dec.atoms.push_back(std::move(atom));
      dec.weights.push_back({normal(rng), normal(rng)});
    }
    const double bound = up_upper_bound(dec);
    const auto path = dec.sample(times, small);
    double sup = 0;
    for (const auto& v : path.values) sup = std::max(sup, v.l2_norm());
    atom_worst = std::max(atom_worst, sup / bound);
  }
  report.sweep.push_back(2);
  report.ratios.push_back(atom_worst);
  report.checks.push_back(make_check("atomic_linf_l2", atom_worst, "<=", 1 + 1e-9));
  set_bounded_verdict(report);
  return report;
}

// ---------------------------------------------------------------- scaling law

double log_decay_orlicz_norm(const YoungFunction& phi, double gamma, double amplitude, double log_lambda) {
  if (!(amplitude > 0)) throw PreconditionError("log_decay_orlicz_norm: amplitude must be positive");
  const double decay = phi.alpha() * gamma;
  if (decay < 1 - 1e-12)
    throw PreconditionError("log_decay_orlicz_norm: alpha gamma < 1, the norm is infinite for every lambda");
  const auto rule = gauss_legendre(16);

  // log of int_R Phi(amplitude / (k ln^gamma(2 + |eta|))) d eta, with y = ln(2 + |eta|).
  auto log_integral = [&](double k) {
    auto exponent = [&](double y) { return y + phi.log_value(amplitude / (k * std::pow(y, gamma))); };
    double acc = -INFINITY;
    double a = std::log(2.0), width = 0.05;
    for (int panel = 0; panel < 2000; ++panel) {
      const double b = a + width;
      double panel_max = -INFINITY;
      std::vector<double> e(rule.nodes.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = exponent(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
        panel_max = std::max(panel_max, e[i]);
      }
      if (panel_max > -INFINITY) {
        double s = 0;
        for (std::size_t i = 0; i < e.size(); ++i) s += rule.weights[i] * std::exp(e[i] - panel_max);
        acc = log_add(acc, panel_max + std::log(0.5 * (b - a) * s));
      }
      // Tail bound from the local decay rate.
      const double eb = exponent(b), rate = (exponent(b - 1e-4 * width) - eb) / (1e-4 * width);
      if (rate > 0 && eb - std::log(rate) < acc - 40) break;
      a = b;
      width = std::min(width * 1.25, rate > 0 ? 2 / rate : width * 1.25);
    }
    return std::log(2.0) + acc;
  };

  // The integral is finite only for k above the critical scale (amplitude when alpha gamma = 1).
  const double k_min = decay > 1 + 1e-12 ? 0.0 : amplitude;
  auto k_of = [&](double u) { return k_min > 0 ? k_min * (1 + std::exp(u)) : amplitude * std::exp(u); };
  double lo = -60, hi = 60;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_lambda + log_integral(k_of(mid)) > 0 ? lo : hi) = mid;
  }
  return k_of(0.5 * (lo + hi));
}

EstimateReport verify_scaling_law(const ScalingOptions& o) {
  EstimateReport report;
  report.id = "scaling_law";
  report.sweep_name = "ln lambda";
  report.predicted_law = "||v0||_{L^hat Phi} <= C (||u0||_{L^hat Phi} + ||u0_hat||_{L^inf}) (ln lambda)^gamma";
  report.band = o.band;
  report.grid = {{"gamma", o.gamma}, {"continuum", 1}};

  const auto phi = YoungFunction::standard_instance(o.gamma, 0);
  const double u_norm = log_decay_orlicz_norm(phi, o.gamma, 1.0, 0.0);
  const double sup = std::pow(std::log(2.0), -o.gamma);
  report.notes.push_back("||u0|| = " + std::to_string(u_norm) + ", ||u0_hat||_inf = " + std::to_string(sup) +
                         ", Phi C = " + std::to_string(phi.C()));
  report.checks.push_back(make_check("lambda_one_ratio", u_norm / (u_norm + sup), "<=", 1));

  for (double L : o.log_lambdas) {
    const double v = log_decay_orlicz_norm(phi, o.gamma, 1.0, L);
    report.sweep.push_back(L);
    report.ratios.push_back(v / ((u_norm + sup) * std::pow(L, o.gamma)));
  }
  // One-sided: the ratio stays below the band and does not grow along the sweep.
  double rising = 0;
  for (std::size_t i = 1; i < report.ratios.size(); ++i)
    rising = std::max(rising, report.ratios[i] / report.ratios[i - 1] - 1);
  report.checks.push_back(make_check("ratio_ceiling", *std::max_element(report.ratios.begin(), report.ratios.end()),
                                     "<=", o.band));
  report.checks.push_back(make_check("ratio_not_growing", rising, "<=", 1e-9));
  report.notes.push_back("two-sided spread max/min = " + std::to_string(spread(report.ratios)) +
                         " (not gated; the law is an upper bound)");

  // Sharpness example with gamma = 1.
  const auto phi1 = YoungFunction::standard_instance(1, 0);
  const double N = o.sharp_N, M = o.sharp_M;
  const SpectrumPiece u_piece{N, -N};
  const double x = (N + std::sqrt(N * N + 4 * phi1.C())) / (2 * phi1.C());  // e^{-N} Phi(N/k) = 1
  const double u_sharp = luxemburg_piecewise_norm(std::span(&u_piece, 1), phi1);
  report.checks.push_back(make_check("sharp_u0_root", std::abs(u_sharp - N / x) / (N / x), "==", 1e-9));
  const SpectrumPiece v_piece{N, std::exp(M) - N};
  const double sharp = luxemburg_piecewise_norm(std::span(&v_piece, 1), phi1) / (N * std::exp(M));
  report.notes.push_back("sharpness ratio ||v0|| / (N e^M) = " + std::to_string(sharp));
  report.checks.push_back(make_check("sharpness_lower", sharp, ">=", 0.25));
  report.checks.push_back(make_check("sharpness_upper", sharp, "<=", 4));
  set_bounded_verdict(report);
  return report;
}

// ---------------------------------------------------------------- persistence

EstimateReport verify_norm_persistence(const PersistenceOptions& o) {
  EstimateReport report;
  report.id = "norm_persistence";
  report.sweep_name = "t";
  report.predicted_law = "sup_t ||u(t)||_{l^Phi L^2} <= C ||u0||_{l^Phi L^2} for small data";
  report.band = o.band;
  report.grid = {{"N", o.N}, {"m", o.m}, {"T", o.T}, {"steps", o.steps}, {"gamma", o.gamma}};

  const FrequencyGrid g(o.N, o.m);
  const auto phi = YoungFunction::standard_instance(o.gamma, 0);
  Field u0(g);
  if (!o.zero_data) {
    u0 = generate_data(g, DataSpec{.family = Family::log_decay, .gamma = o.gamma});
    u0 *= o.target_norm / modulation_orlicz_norm(u0, phi);
  }
  const double n0 = modulation_orlicz_norm(u0, phi);
  if (n0 == 0) {
    report.notes.push_back("zero data: ratio undefined, trivial pass");
    report.checks.push_back(make_check("zero_data", 0, "==", 0));
    set_bounded_verdict(report);
    return report;
  }
  if (n0 > 0.1 * (1 + 1e-9)) throw PreconditionError("verify_norm_persistence: l^Phi L^2 norm of the data exceeds 0.1");

  const auto traj = splitstep_evolve(u0, EvolutionConfig{o.T, o.steps, o.stride});
  double worst = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    report.sweep.push_back(traj.times()[k]);
    report.ratios.push_back(modulation_orlicz_norm(traj.frame(k), phi) / n0);
    worst = std::max(worst, report.ratios.back());
  }
  report.checks.push_back(make_check("nonlinear_ratio", worst, "<=", o.band));

  double linear = 0;
  for (double t : {0.25, 0.5, 1.0})
    linear = std::max(linear, std::abs(modulation_orlicz_norm(free_evolve(u0, t * o.T), phi) / n0 - 1));
  report.checks.push_back(make_check("linear_ratio_deviation", linear, "==", 1e-9));
  set_bounded_verdict(report);
  return report;
}

}  // namespace nlslab
