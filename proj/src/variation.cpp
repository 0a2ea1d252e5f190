#include "nlslab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "nlslab/evolution.hpp"

namespace nlslab {

TimeSampledPath::TimeSampledPath(std::vector<double> t, std::vector<Field> v, bool with_tail)
    : times(std::move(t)), values(std::move(v)), tail(with_tail) {
  if (times.size() != values.size()) throw PreconditionError("TimeSampledPath: times and values differ in length");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw PreconditionError("TimeSampledPath: times must increase strictly");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k].grid() == values[0].grid())) throw PreconditionError("TimeSampledPath: grids differ");
}

TimeSampledPath path_from(const SpaceTimeField<double>& field, bool tail) {
  return TimeSampledPath(field.times(), field.frames(), tail);
}

Eigen::MatrixXd pairwise_distances(const TimeSampledPath& path) {
  const std::size_t n = path.size();
  const std::size_t total = n + (path.tail ? 1 : 0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total, total);
  // Direct differences: the Gram form ||a||^2 + ||b||^2 - 2 Re<a, b> cancels badly for close samples.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = std::sqrt(path.values[i].dxi() * (path.values[j].coeffs() - path.values[i].coeffs()).squaredNorm());
  if (path.tail)
    for (std::size_t i = 0; i < n; ++i) d(i, n) = d(n, i) = path.values[i].l2_norm();
  return d;
}

VariationResult vp_norm_detailed(const TimeSampledPath& path, double p) {
  if (!(p >= 1) || std::isinf(p)) throw PreconditionError("vp_norm: p must lie in [1, inf)");
  VariationResult result;
  if (path.size() < 2 && !path.tail) {
    if (path.size() == 1) std::cerr << "vp_norm: single sample, variation is 0\n";
    return result;
  }
  const auto d = pairwise_distances(path);
  const std::size_t total = d.rows();
  std::vector<double> best(total, 0.0);
  std::vector<std::ptrdiff_t> from(total, -1);
  for (std::size_t j = 1; j < total; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double candidate = best[i] + std::pow(d(i, j), p);
      if (candidate > best[j]) {
        best[j] = candidate;
        from[j] = static_cast<std::ptrdiff_t>(i);
      }
    }
  const auto end = std::max_element(best.begin(), best.end()) - best.begin();
  result.value = std::pow(best[end], 1.0 / p);
  if (best[end] > 0)
    for (std::ptrdiff_t k = end; k >= 0; k = from[k]) result.partition.insert(result.partition.begin(), k);
  return result;
}

double vp_norm(const TimeSampledPath& path, double p) { return vp_norm_detailed(path, p).value; }

RefinedVariation vp_norm_refined(const std::function<TimeSampledPath(int level)>& sample, double p,
                                 double tolerance, int max_levels) {
  if (max_levels < 2) throw PreconditionError("vp_norm_refined: need at least two levels");
  RefinedVariation out;
  double previous = vp_norm(sample(0), p);
  out.value = previous;
  out.levels = 1;
  for (int level = 1; level < max_levels; ++level) {
    const double current = vp_norm(sample(level), p);
    out.value = current;
    out.levels = level + 1;
    out.last_change = current == previous ? 0.0 : std::abs(current - previous) / std::max(current, previous);
    if (out.last_change < tolerance) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  return out;
}

double vp_norm_bruteforce(const TimeSampledPath& path, double p) {
  if (path.size() > 16) throw PreconditionError("vp_norm_bruteforce: at most 16 samples");
  if (!(p >= 1) || std::isinf(p)) throw PreconditionError("vp_norm_bruteforce: p must lie in [1, inf)");
  const std::size_t n = path.size();
  const std::size_t total = n + (path.tail ? 1 : 0);
  auto dist = [&](std::size_t i, std::size_t j) {
    if (j == n) return path.values[i].l2_norm();
    return std::sqrt(path.values[i].dxi() * (path.values[j].coeffs() - path.values[i].coeffs()).squaredNorm());
  };
  double best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << total); ++mask) {
    double sum = 0;
    std::ptrdiff_t prev = -1;
    for (std::size_t k = 0; k < total; ++k) {
      if (!(mask >> k & 1)) continue;
      if (prev >= 0) sum += std::pow(dist(prev, k), p);
      prev = static_cast<std::ptrdiff_t>(k);
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / p);
}

Field StepAtom::at(double t, const FrequencyGrid& grid) const {
  for (std::size_t k = 1; k < times.size(); ++k)
    if (t >= times[k - 1] && t < times[k]) return steps[k - 1];
  return Field(grid);
}

bool is_valid_atom(const StepAtom& atom, double p, double tol) {
  if (atom.times.size() != atom.steps.size() + 1 || atom.steps.empty()) return false;
  for (std::size_t k = 1; k < atom.times.size(); ++k)
    if (!(atom.times[k] > atom.times[k - 1])) return false;
  if (atom.steps.front().coeffs().squaredNorm() != 0) return false;
  double sum = 0;
  for (const auto& phi : atom.steps) sum += std::pow(phi.l2_norm(), p);
  return std::abs(sum - 1) <= tol;
}

TimeSampledPath AtomicDecomposition::sample(const std::vector<double>& times, const FrequencyGrid& grid,
                                            bool tail) const {
  std::vector<Field> values;
  values.reserve(times.size());
  for (double t : times) {
    Field value(grid);
    for (std::size_t j = 0; j < atoms.size(); ++j) value += weights[j] * atoms[j].at(t, grid);
    values.push_back(std::move(value));
  }
  return TimeSampledPath(times, std::move(values), tail);
}

double up_upper_bound(const AtomicDecomposition& decomposition) {
  if (decomposition.weights.size() != decomposition.atoms.size())
    throw PreconditionError("up_upper_bound: one weight per atom");
  double sum = 0;
  for (std::size_t j = 0; j < decomposition.atoms.size(); ++j) {
    if (!is_valid_atom(decomposition.atoms[j], decomposition.p))
      throw PreconditionError("up_upper_bound: atom " + std::to_string(j) + " is not normalized");
    sum += std::abs(decomposition.weights[j]);
  }
  return sum;
}

AtomicDecomposition canonical_decomposition(const TimeSampledPath& step_path, double p) {
  if (step_path.size() < 2) throw PreconditionError("canonical_decomposition: need at least two samples");
  if (step_path.values.front().coeffs().squaredNorm() != 0)
    throw PreconditionError("canonical_decomposition: the path must start at 0");
  double sum = 0;
  for (const auto& v : step_path.values) sum += std::pow(v.l2_norm(), p);
  const double c = std::pow(sum, 1.0 / p);
  AtomicDecomposition out;
  out.p = p;
  if (c == 0) return out;
  StepAtom atom;
  atom.times = step_path.times;
  // The last sample closes the final step; past it the atom vanishes.
  for (std::size_t k = 0; k + 1 < step_path.size(); ++k)
    atom.steps.push_back(std::complex<double>(1 / c) * step_path.values[k]);
  // A nonzero last value gets one more step of the same length, so sampling the atom
  // at the path's times reproduces the path.
  if (step_path.values.back().coeffs().squaredNorm() != 0) {
    const double dt = step_path.times.back() - step_path.times[step_path.size() - 2];
    atom.times.push_back(step_path.times.back() + dt);
    atom.steps.push_back(std::complex<double>(1 / c) * step_path.values.back());
  }
  out.weights.push_back(c);
  out.atoms.push_back(std::move(atom));
  return out;
}

std::complex<double> duality_pairing(const TimeSampledPath& u, const TimeSampledPath& v) {
  if (u.times != v.times) throw PreconditionError("duality_pairing: paths need a common sample grid");
  std::complex<double> sum = 0;
  for (std::size_t k = 1; k < u.size(); ++k) sum += inner_product(u.values[k - 1], v.values[k] - v.values[k - 1]);
  if (v.tail && u.size() > 0) sum -= inner_product(u.values.back(), v.values.back());
  return sum;
}

double u2_lower_bound(const TimeSampledPath& u, const std::vector<TimeSampledPath>& probes) {
  double best = 0;
  for (const auto& v : probes) {
    const double norm = vp_norm(v, 2.0);
    if (norm > 0) best = std::max(best, std::abs(duality_pairing(u, v)) / norm);
  }
  return best;
}

std::vector<TimeSampledPath> random_probes(const TimeSampledPath& u, int count, std::mt19937_64& rng, double lo,
                                           double hi) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<TimeSampledPath> probes;
  const auto& grid = u.values.front().grid();
  for (int c = 0; c < count; ++c) {
    std::vector<Field> values;
    for (std::size_t k = 0; k < u.size(); ++k) {
      Field f(grid);
      for (Eigen::Index s = 0; s < f.size(); ++s) {
        const double xi = grid.xi_at_slot(s);
        if (xi >= lo && xi < hi) f.coeffs()[s] = {g(rng), g(rng)};
      }
      values.push_back(std::move(f));
    }
    probes.emplace_back(u.times, std::move(values), u.tail);
  }
  return probes;
}

TimeSampledPath adapted_path(const SpaceTimeField<double>& field, bool tail) {
  std::vector<Field> values;
  values.reserve(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) values.push_back(free_evolve(field.frame(k), -field.times()[k]));
  return TimeSampledPath(field.times(), std::move(values), tail);
}

}  // namespace nlslab
