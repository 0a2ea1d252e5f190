#pragma once

// Empirical verification of the quantitative inequalities: sweeps, measured
// ratios, power-law fits and verdicts.

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nlslab/data.hpp"
#include "nlslab/orlicz.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

// ---------------------------------------------------------------- reports

enum class Verdict { bounded, growth_consistent, violated, inconclusive };
std::string verdict_name(Verdict v);

struct Check {
  std::string name;
  double value = 0;
  double threshold = 0;
  std::string relation = "<=";  // "<=", ">=", "==" (within threshold)
  bool passed = false;
};

/// value relation threshold, evaluated once and stored.
Check make_check(std::string name, double value, std::string relation, double threshold);

/// Least squares fit ln y = intercept + exponent ln x. Residual is the RMS of the log residuals.
struct PowerFit {
  double exponent = 0, intercept = 0, residual = 0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct EstimateReport {
  std::string id;
  std::string sweep_name;
  std::vector<double> sweep;
  std::vector<double> ratios;
  std::optional<PowerFit> fit;
  std::string fit_abscissa;  // what x the fit runs against, e.g. "lambda" or "ln|I|"
  std::vector<double> fit_x, fit_y;  // the data behind `fit`
  std::string predicted_law;
  double predicted_exponent = 0;
  double band = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<Check> checks;
  std::map<std::string, double> grid;  // provenance: N, m, T, steps, ...
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> notes;

  bool passed() const;
  const Check* find_check(const std::string& name) const;
};

/// "bounded" when every check passes, "violated" otherwise.
void set_bounded_verdict(EstimateReport& report);
/// "growth_consistent" when the exponent is within predicted + slack and every check passes;
/// "inconclusive" when the fit residual exceeds max_residual.
void set_growth_verdict(EstimateReport& report, double slack = 0.15, double max_residual = 0.1);

// ---------------------------------------------------------------- work queue

/// Runs f(0..count-1) on a pool of threads; results land in index order, so output is
/// independent of scheduling. The first exception by index is rethrown.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, F&& f, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- parameters

struct EstimateParams {
  double theta = 0.5;       // interpolation weight, (0, 1)
  double beta_log = 1.5;    // log exponent of the restriction bound, > 1
  double beta_decay = 1.0;  // power-decay exponent of test data, > 0
  double p = 4;             // modulation index
  double gamma = 3;         // Orlicz parameter
  double T = 1;             // horizon
  std::vector<double> lambda_sweep{8, 16, 32, 64, 128};

  /// Throws PreconditionError naming the violated range.
  void validate() const;
};

// ---------------------------------------------------------------- strichartz

struct StrichartzOptions {
  double p = 6, q = 6;
  int N = 512, m = 16;  // base grid; the refinement uses (2N, 2m)
  double T = 1;
  int steps = 1000;
  int random_fields = 10;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// 2/p + 1/q = 1/2 with 4 <= p <= inf; throws PreconditionError echoing the relation.
void check_admissible(double p, double q);

/// ||e^{it Delta} u0||_{L^p L^q([0,T])} / ||u0||_{L^2} on Gaussian, flat-band and random-phase
/// data at (N, m) and (2N, 2m).
EstimateReport verify_strichartz(const StrichartzOptions& options);

// ---------------------------------------------------------------- bilinear

/// F_x(u vbar)(t, xi) evaluated as the lattice sum
/// (dxi / sqrt(2 pi)) sum_l e^{-it xi^2 + 2it xi xi_l} u0_hat(xi - xi_l) conj(v0_hat(-xi_l)).
std::complex<double> bilinear_kernel_direct(const Field& u0, const Field& v0, double t, double xi);
/// The same coefficient through evolution, pointwise product and transform.
Field bilinear_product_spectrum(const Field& u0, const Field& v0, double t);

/// Maximum relative error between the two computations over the sample points,
/// normalized by the largest coefficient of the product spectrum.
double verify_bilinear_kernel(const Field& u0, const Field& v0, const std::vector<double>& t_samples,
                              const std::vector<double>& xi_samples);

/// Frequency-side value of ||P_{>lambda}(u vbar)||^2_{L^2(R x R)}:
/// sum over lattice pairs with |xi_1 - xi_2| > lambda of |u0_hat|^2 |v0_hat|^2 / (2 |xi_1 - xi_2|) dxi^2.
double bilinear_identity(const Field& u0, const Field& v0, double lambda);

/// Windowed ||P_{>lambda}(u vbar)||^2_{L^2([-T_w, T_w] x R)} by Simpson's rule.
double bilinear_windowed(const Field& u0, const Field& v0, double lambda, double window, double dt);

struct BilinearOptions {
  // identity check
  int identity_N = 4096, identity_m = 64;
  double identity_lambda = 10;
  double first_window = 2;
  int max_doublings = 6;
  // lambda sweep: u0 = 1_[0,1), v0 = 1_[lambda+2, lambda+3)
  std::vector<double> lambdas{8, 16, 32, 64, 128};
  int sweep_m = 32;
  double window_scale = 20;  // sweep window T_w = window_scale / (lambda + 2.5)
  unsigned threads = 0;
};

EstimateReport verify_bilinear_inequality(const BilinearOptions& options);

// ---------------------------------------------------------------- restriction

/// ||u||^4_{L^4([0,1] x R)} for the free evolution, by graded Gauss-Legendre panels in time.
double free_l4_fourth_power(const Field& u0, double horizon, int nodes_per_panel = 8);

struct RestrictionOptions {
  std::vector<int> sizes{4, 8, 16, 32, 64, 128, 256};
  int seeds = 20;
  std::uint64_t first_seed = 100;
  unsigned threads = 0;
};

/// Data on the centred interval I = [-n/2, n/2), grid m = max(8, n/2), N = 2 n m.
FrequencyGrid restriction_grid(int n);

/// R(|I|) = ||P_I u||_{L^4} / (sum_k ||u_{0,k}||^4)^{1/4}.
double restriction_ratio(const Field& u0);

EstimateReport verify_restriction_L4(const RestrictionOptions& options);

// ---------------------------------------------------------------- embeddings

struct EmbeddingOptions {
  int N = 512, m = 8;
  int samples = 50;
  std::vector<double> modulation_indices{2, 4, 8};
  double gamma = 3;
  std::uint64_t seed = 7;
};

EstimateReport verify_embeddings(const EmbeddingOptions& options);

// ---------------------------------------------------------------- scaling law

/// L^hat Phi norm of u0_hat(xi) = amplitude / ln^gamma(2 + |xi|) dilated by lambda = e^{log_lambda},
/// by log-domain quadrature on R. Needs alpha gamma = 1.
double log_decay_orlicz_norm(const YoungFunction& phi, double gamma, double amplitude, double log_lambda);

struct ScalingOptions {
  double gamma = 3;
  std::vector<double> log_lambdas{1, 2, 4, 8};
  double band = 4;
  // sharpness example: u0_hat = N 1_[0, e^{-N}], lambda = e^{e^M}, gamma = 1
  double sharp_N = 2, sharp_M = 8;
};

EstimateReport verify_scaling_law(const ScalingOptions& options);

// ---------------------------------------------------------------- persistence

struct PersistenceOptions {
  int N = 1024, m = 8;
  double T = 1;
  int steps = 1000;
  int stride = 10;
  double gamma = 3;
  double target_norm = 0.1;
  double band = 4;
  bool zero_data = false;
};

EstimateReport verify_norm_persistence(const PersistenceOptions& options);

}  // namespace nlslab
