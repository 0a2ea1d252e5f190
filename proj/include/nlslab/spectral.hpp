#pragma once

// Periodic pseudospectral core.
//
// The real line is modelled by the torus [-L/2, L/2) with L = 2*pi*m. A grid
// with N samples carries the Fourier modes xi_j = j/m, j in [-N/2, N/2), so
// every unit frequency interval [k, k+1) holds exactly m modes.
//
// Transform convention (unitary):
//
//   u_hat(xi) = (2 pi)^{-1/2} \int e^{-i x xi} u(x) dx,
//   u(x)      = (2 pi)^{-1/2} \int e^{+i x xi} u_hat(xi) dxi,
//
// discretized with the rectangle rule on both sides. Under this convention
// ||u||_{L^2}^2 = dx sum |u_n|^2 = dxi sum |u_hat_j|^2 exactly.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "nlslab/errors.hpp"

namespace nlslab {

inline bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class FrequencyGrid {
 public:
  FrequencyGrid(int num_modes, int modes_per_unit)
      : num_modes_(num_modes), modes_per_unit_(modes_per_unit) {
    if (!is_power_of_two(num_modes))
      throw PreconditionError("FrequencyGrid: N = " + std::to_string(num_modes) +
                              " is not a power of two");
    if (modes_per_unit < 1)
      throw PreconditionError("FrequencyGrid: modes_per_unit must be positive");
    if (num_modes < 16 * modes_per_unit)
      throw PreconditionError("FrequencyGrid: N/(2m) must be at least 8 (N = " +
                              std::to_string(num_modes) +
                              ", m = " + std::to_string(modes_per_unit) + ")");
  }

  int num_modes() const { return num_modes_; }
  int modes_per_unit() const { return modes_per_unit_; }
  double mode_spacing() const { return 1.0 / modes_per_unit_; }
  double period() const { return 2.0 * std::numbers::pi * modes_per_unit_; }
  double dx() const { return period() / num_modes_; }

  int min_index() const { return -num_modes_ / 2; }
  int max_index() const { return num_modes_ / 2 - 1; }
  /// Largest representable |xi| (the Nyquist frequency N dxi / 2).
  double nyquist() const { return 0.5 * num_modes_ * mode_spacing(); }

  double xi(int j) const { return static_cast<double>(j) / modes_per_unit_; }
  double xi_at_slot(Eigen::Index slot) const { return xi(index_of(slot)); }
  double x(int n) const { return (n - num_modes_ / 2) * dx(); }

  Eigen::Index slot_of(int j) const { return j + num_modes_ / 2; }
  int index_of(Eigen::Index slot) const { return static_cast<int>(slot) - num_modes_ / 2; }

  /// First slot whose frequency is >= a, clamped to [0, N].
  Eigen::Index first_slot_at_or_above(double a) const {
    const double scaled = a * modes_per_unit_;
    const double j = std::ceil(scaled - 1e-9 * std::max(1.0, std::abs(scaled)));
    const double slot = j + num_modes_ / 2;
    if (slot <= 0) return 0;
    if (slot >= num_modes_) return num_modes_;
    return static_cast<Eigen::Index>(slot);
  }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  int num_modes_;
  int modes_per_unit_;
};

template <typename Scalar = double>
class SpectralField {
 public:
  using Complex = std::complex<Scalar>;
  using Coefficients = ComplexVector<Scalar>;

  explicit SpectralField(const FrequencyGrid& grid)
      : grid_(grid), coeffs_(Coefficients::Zero(grid.num_modes())) {}

  SpectralField(const FrequencyGrid& grid, Coefficients coeffs)
      : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.num_modes())
      throw PreconditionError("SpectralField: coefficient count does not match grid");
  }

  /// Samples a spectrum given as a function of xi at every grid mode.
  template <typename F>
  static SpectralField from_spectrum(const FrequencyGrid& grid, F&& spectrum) {
    SpectralField field(grid);
    for (Eigen::Index s = 0; s < field.size(); ++s)
      field.coeffs_[s] = Complex(spectrum(static_cast<Scalar>(grid.xi_at_slot(s))));
    return field;
  }

  const FrequencyGrid& grid() const { return grid_; }
  const Coefficients& coeffs() const { return coeffs_; }
  Coefficients& coeffs() { return coeffs_; }
  Eigen::Index size() const { return coeffs_.size(); }

  /// Coefficient at mode index j in [-N/2, N/2).
  Complex at(int j) const { return coeffs_[grid_.slot_of(j)]; }
  Complex& at(int j) { return coeffs_[grid_.slot_of(j)]; }

  Scalar xi(Eigen::Index slot) const { return static_cast<Scalar>(grid_.xi_at_slot(slot)); }
  Scalar dxi() const { return static_cast<Scalar>(grid_.mode_spacing()); }

  Scalar l2_norm() const { return std::sqrt(dxi() * coeffs_.squaredNorm()); }

  SpectralField& operator+=(const SpectralField& other) {
    check_same_grid(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& other) {
    check_same_grid(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  SpectralField& operator*=(Complex c) {
    coeffs_ *= c;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex c, SpectralField a) { return a *= c; }
  friend SpectralField operator*(SpectralField a, Complex c) { return a *= c; }

 private:
  void check_same_grid(const SpectralField& other) const {
    if (!(grid_ == other.grid_)) throw PreconditionError("SpectralField: grids differ");
  }

  FrequencyGrid grid_;
  Coefficients coeffs_;
};

using Field = SpectralField<double>;

/// L^2 inner product <u, v> = \int u conj(v) dx, evaluated in frequency space.
template <typename Scalar>
std::complex<Scalar> inner_product(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v) {
  if (!(u.grid() == v.grid())) throw PreconditionError("inner_product: grids differ");
  // Eigen's dot conjugates the first argument.
  return u.dxi() * v.coeffs().dot(u.coeffs());
}

template <typename Scalar>
Scalar l2_norm(const SpectralField<Scalar>& u) {
  return u.l2_norm();
}

/// Uniformly time-sampled trajectory t_0 < t_1 < ... < t_M.
template <typename Scalar = double>
class SpaceTimeField {
 public:
  SpaceTimeField(const FrequencyGrid& grid, std::vector<double> times,
                 std::vector<SpectralField<Scalar>> frames)
      : grid_(grid), times_(std::move(times)), frames_(std::move(frames)) {
    if (times_.size() != frames_.size() || times_.empty())
      throw PreconditionError("SpaceTimeField: need one frame per time, at least one");
    for (const auto& f : frames_)
      if (!(f.grid() == grid_)) throw PreconditionError("SpaceTimeField: frame grid mismatch");
    if (times_.size() > 1) {
      const double step = (times_.back() - times_.front()) / (times_.size() - 1);
      if (!(step > 0)) throw PreconditionError("SpaceTimeField: times must increase");
      for (std::size_t k = 1; k < times_.size(); ++k) {
        const double gap = times_[k] - times_[k - 1];
        if (!(gap > 0) || std::abs(gap - step) > 1e-9 * std::max(1.0, std::abs(step)))
          throw PreconditionError("SpaceTimeField: times must be uniform and increasing");
      }
    }
  }

  /// Frames u(t_0 + k T / M), k = 0..M.
  static SpaceTimeField uniform(const FrequencyGrid& grid, double t0, double horizon,
                                std::vector<SpectralField<Scalar>> frames) {
    std::vector<double> times(frames.size());
    const std::size_t steps = frames.empty() ? 0 : frames.size() - 1;
    for (std::size_t k = 0; k < times.size(); ++k)
      times[k] = steps == 0 ? t0 : t0 + horizon * static_cast<double>(k) / steps;
    return SpaceTimeField(grid, std::move(times), std::move(frames));
  }

  const FrequencyGrid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SpectralField<Scalar>>& frames() const { return frames_; }
  const SpectralField<Scalar>& frame(std::size_t k) const { return frames_[k]; }
  std::size_t size() const { return frames_.size(); }
  double dt() const {
    return times_.size() > 1 ? (times_.back() - times_.front()) / (times_.size() - 1) : 0.0;
  }
  double horizon() const { return times_.back() - times_.front(); }

 private:
  FrequencyGrid grid_;
  std::vector<double> times_;
  std::vector<SpectralField<Scalar>> frames_;
};

/// Dyadic frequency interval I_j = [3/4 2^j, 3/2 2^j).
struct DyadicInterval {
  int scale = 0;

  double lo() const { return 0.75 * std::ldexp(1.0, scale); }
  double hi() const { return 1.5 * std::ldexp(1.0, scale); }
  bool contains(double xi) const { return xi >= lo() && xi < hi(); }

  /// The scale whose interval contains xi >= 3/4.
  static DyadicInterval containing(double xi) {
    if (!(xi >= 0.75)) throw PreconditionError("DyadicInterval: xi must be >= 3/4");
    int j = static_cast<int>(std::floor(std::log2(xi / 0.75)));
    DyadicInterval d{std::max(j, 0)};
    while (xi >= d.hi()) ++d.scale;
    while (d.scale > 0 && xi < d.lo()) --d.scale;
    return d;
  }
};

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine = [] {
    Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return fft;
  }();
  return engine;
}

}  // namespace detail

/// Physical samples u(x_n), x_n = (n - N/2) dx, to Fourier coefficients.
template <typename Scalar>
SpectralField<Scalar> forward_transform(const FrequencyGrid& grid,
                                        const ComplexVector<Scalar>& samples) {
  const Eigen::Index n = grid.num_modes();
  if (samples.size() != n)
    throw PreconditionError("forward_transform: expected " + std::to_string(n) + " samples, got " +
                            std::to_string(samples.size()));
  ComplexVector<Scalar> dft(n);
  detail::fft_engine<Scalar>().fwd(dft.data(), samples.data(), n);
  const Scalar scale = static_cast<Scalar>(grid.dx() / std::sqrt(2.0 * std::numbers::pi));
  SpectralField<Scalar> out(grid);
  auto& c = out.coeffs();
  const Eigen::Index half = n / 2;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = k < half ? k : k - n;
    const Scalar sign = (j & 1) ? Scalar(-1) : Scalar(1);
    c[j + half] = (scale * sign) * dft[k];
  }
  return out;
}

/// Overload that builds the grid from the sample count; rejects non-powers of two.
template <typename Scalar>
SpectralField<Scalar> forward_transform(const ComplexVector<Scalar>& samples, int modes_per_unit) {
  if (!is_power_of_two(samples.size()))
    throw PreconditionError("forward_transform: sample count " + std::to_string(samples.size()) +
                            " is not a power of two");
  return forward_transform<Scalar>(
      FrequencyGrid(static_cast<int>(samples.size()), modes_per_unit), samples);
}

template <typename Scalar>
ComplexVector<Scalar> inverse_transform(const SpectralField<Scalar>& field) {
  const auto& grid = field.grid();
  const Eigen::Index n = grid.num_modes();
  const Eigen::Index half = n / 2;
  ComplexVector<Scalar> buf(n);
  const auto& c = field.coeffs();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = k < half ? k : k - n;
    buf[k] = ((j & 1) ? Scalar(-1) : Scalar(1)) * c[j + half];
  }
  ComplexVector<Scalar> out(n);
  detail::fft_engine<Scalar>().inv(out.data(), buf.data(), n);
  out *= static_cast<Scalar>(grid.mode_spacing() / std::sqrt(2.0 * std::numbers::pi));
  return out;
}

template <typename Scalar = double>
RealVector<Scalar> physical_positions(const FrequencyGrid& grid) {
  RealVector<Scalar> x(grid.num_modes());
  for (int n = 0; n < grid.num_modes(); ++n) x[n] = static_cast<Scalar>(grid.x(n));
  return x;
}

/// Samples a physical-space function at the grid points and transforms it.
template <typename Scalar = double, typename F>
SpectralField<Scalar> sample_physical(const FrequencyGrid& grid, F&& f) {
  ComplexVector<Scalar> samples(grid.num_modes());
  for (int n = 0; n < grid.num_modes(); ++n)
    samples[n] = std::complex<Scalar>(f(static_cast<Scalar>(grid.x(n))));
  return forward_transform<Scalar>(grid, samples);
}

/// P_I u for the half-open band I = [a, b).
template <typename Scalar>
SpectralField<Scalar> project_band(const SpectralField<Scalar>& u, double a, double b) {
  if (!(a < b)) throw PreconditionError("project_band: need a < b");
  const auto& grid = u.grid();
  const Eigen::Index lo = grid.first_slot_at_or_above(a);
  const Eigen::Index hi = grid.first_slot_at_or_above(b);
  SpectralField<Scalar> out(grid);
  if (hi > lo) out.coeffs().segment(lo, hi - lo) = u.coeffs().segment(lo, hi - lo);
  return out;
}

/// P_k u = P_{[k, k+1)} u.
template <typename Scalar>
SpectralField<Scalar> project_block(const SpectralField<Scalar>& u, int k) {
  return project_band(u, k, k + 1);
}

/// Frequency-side mask |xi| > lambda (the operator P_{>lambda}).
template <typename Scalar>
SpectralField<Scalar> project_high(const SpectralField<Scalar>& u, double lambda) {
  SpectralField<Scalar> out = u;
  auto& c = out.coeffs();
  for (Eigen::Index s = 0; s < c.size(); ++s)
    if (!(std::abs(u.grid().xi_at_slot(s)) > lambda)) c[s] = 0;
  return out;
}

template <typename Scalar>
struct UnitBlock {
  int k;
  Scalar mass;  // ||P_k u||_{L^2}
};

/// (k, ||P_k u||_{L^2}) for every unit block with nonzero mass, ordered by k.
template <typename Scalar>
std::vector<UnitBlock<Scalar>> unit_blocks(const SpectralField<Scalar>& u) {
  const auto& grid = u.grid();
  const int m = grid.modes_per_unit();
  const auto& c = u.coeffs();
  std::vector<UnitBlock<Scalar>> blocks;
  // Slot 0 has index -N/2, a multiple of m, so blocks start at slot multiples of m.
  for (Eigen::Index start = 0; start < c.size(); start += m) {
    const Scalar sq = c.segment(start, m).squaredNorm();
    if (sq > 0) {
      const int k = grid.index_of(start) / m;
      blocks.push_back({k, std::sqrt(u.dxi() * sq)});
    }
  }
  return blocks;
}

/// Fraction of L^2 mass carried by modes with |xi| <= limit.
template <typename Scalar>
Scalar mass_fraction_within(const SpectralField<Scalar>& u, double limit) {
  const auto& c = u.coeffs();
  Scalar inside = 0, total = 0;
  for (Eigen::Index s = 0; s < c.size(); ++s) {
    const Scalar w = std::norm(c[s]);
    total += w;
    if (std::abs(u.grid().xi_at_slot(s)) <= limit) inside += w;
  }
  return total > 0 ? inside / total : Scalar(1);
}

}  // namespace nlslab
