#pragma once

// Spherical-harmonic analysis/synthesis, Laplacian, collocation derivatives,
// quadrature and deterministic test data on a SphereGrid.
//
// Harmonics are orthonormal with the Condon-Shortley phase:
//   Y_lm = Pbar_lm(cos theta) e^{i m phi},  int Y_lm conj(Y_l'm') dmu = delta,
// and real fields satisfy a_{l,-m} = (-1)^m conj(a_{l,m}).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "sphflow/field.hpp"

namespace sphflow {

using Complex = std::complex<double>;

class SpectralCoeffs
{
 public:
  explicit SpectralCoeffs(int band_limit) : L_(band_limit), a_(static_cast<std::size_t>((band_limit + 1) * (band_limit + 1))) {}

  int L() const { return L_; }

  Complex& at(int l, int m) { return a_[index(l, m)]; }
  const Complex& at(int l, int m) const { return a_[index(l, m)]; }

  /// Largest violation of a_{l,-m} = (-1)^m conj(a_{l,m}).
  double conjugate_symmetry_defect() const
  {
    double worst = 0.0;
    for (int l = 0; l <= L_; ++l)
      for (int m = 0; m <= l; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        worst = std::max(worst, std::abs(at(l, -m) - sign * std::conj(at(l, m))));
      }
    return worst;
  }

  double max_abs_difference(const SpectralCoeffs& o) const
  {
    if (o.L_ != L_) throw std::invalid_argument("SpectralCoeffs: band limits differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) worst = std::max(worst, std::abs(a_[k] - o.a_[k]));
    return worst;
  }

  double max_abs() const
  {
    double worst = 0.0;
    for (const auto& c : a_) worst = std::max(worst, std::abs(c));
    return worst;
  }

 private:
  std::size_t index(int l, int m) const
  {
    if (l < 0 || l > L_ || m < -l || m > l)
      throw std::out_of_range("SpectralCoeffs: (l, m) = (" + std::to_string(l) + ", " + std::to_string(m) +
                              ") outside band limit " + std::to_string(L_));
    return static_cast<std::size_t>(l * l + l + m);
  }

  int L_;
  std::vector<Complex> a_;
};

namespace detail {

inline SpectralCoeffs analyze_to_degree(const ScalarField& f, int degree)
{
  const auto& g = *f.grid();
  const double dphi = 2.0 * std::numbers::pi / g.n_phi();
  const Matrix fc = f.values().matrix() * g.cos_table().leftCols(degree + 1) * dphi;
  const Matrix fs = f.values().matrix() * g.sin_table().leftCols(degree + 1) * dphi;
  const Matrix& plm = g.legendre();
  const Vector& w = g.quad_weights();

  SpectralCoeffs c(degree);
  for (int m = 0; m <= degree; ++m) {
    for (int l = m; l <= degree; ++l) {
      const int k = SphereGrid::lm_index(l, m);
      double re = 0.0, im = 0.0;
      for (int i = 0; i < g.n_theta(); ++i) {
        const double wp = w[i] * plm(i, k);
        re += wp * fc(i, m);
        im -= wp * fs(i, m);
      }
      c.at(l, m) = Complex(re, im);
      if (m > 0) c.at(l, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * Complex(re, -im);
    }
  }
  return c;
}

inline ScalarField synthesize_any_degree(const SpectralCoeffs& c, const GridPtr& grid)
{
  const auto& g = *grid;
  const int L = c.L();
  const Matrix& plm = g.legendre();
  Matrix gr = Matrix::Zero(g.n_theta(), L + 1);
  Matrix gi = Matrix::Zero(g.n_theta(), L + 1);
  for (int m = 0; m <= L; ++m) {
    const double mult = (m == 0) ? 1.0 : 2.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      double re = 0.0, im = 0.0;
      for (int l = m; l <= L; ++l) {
        const double p = plm(i, SphereGrid::lm_index(l, m));
        re += c.at(l, m).real() * p;
        im += c.at(l, m).imag() * p;
      }
      gr(i, m) = mult * re;
      gi(i, m) = mult * im;
    }
  }
  Matrix out = gr * g.cos_table().leftCols(L + 1).transpose() - gi * g.sin_table().leftCols(L + 1).transpose();
  return ScalarField(grid, out.array());
}

}  // namespace detail

/// Projection onto harmonics of degree <= grid L. Gauss quadrature in theta,
/// discrete Fourier sums in phi.
inline SpectralCoeffs sh_analyze(const ScalarField& f) { return detail::analyze_to_degree(f, f.grid()->L()); }

/// Evaluate sum a_lm Y_lm on the grid. Only m >= 0 entries are read; the
/// negative-m half is implied by conjugate symmetry.
inline ScalarField sh_synthesize(const SpectralCoeffs& c, const GridPtr& grid)
{
  if (c.L() > grid->L())
    throw std::invalid_argument("sh_synthesize: coefficient band limit " + std::to_string(c.L()) +
                                " exceeds grid band limit " + std::to_string(grid->L()));
  return detail::synthesize_any_degree(c, grid);
}

/// Truncate to degree <= L (the grid band limit).
inline ScalarField lowpass(const ScalarField& f) { return sh_synthesize(sh_analyze(f), f.grid()); }

/// Coefficients below this fraction of the largest one are treated as zero
/// before differentiating.
inline constexpr double kChopRelative = 1e-14;

namespace detail {

// quadrature noise would otherwise be amplified by every derivative
inline void chop(SpectralCoeffs& a)
{
  const double cut = kChopRelative * a.max_abs();
  for (int l = 0; l <= a.L(); ++l)
    for (int m = -l; m <= l; ++m)
      if (std::abs(a.at(l, m)) <= cut) a.at(l, m) = 0.0;
}

}  // namespace detail

inline ScalarField laplacian(const ScalarField& f)
{
  auto c = sh_analyze(f);
  detail::chop(c);
  for (int l = 0; l <= c.L(); ++l)
    for (int m = -l; m <= l; ++m) c.at(l, m) *= -static_cast<double>(l) * (l + 1);
  return sh_synthesize(c, f.grid());
}

/// Exact Fourier derivative in longitude.
inline ScalarField d_phi(const ScalarField& f)
{
  Matrix out = f.values().matrix() * f.grid()->phi_derivative_T();
  return ScalarField(f.grid(), out.array());
}

/// d/dtheta via collocation in x = cos(theta).
///
/// A frame component of a smooth rank-k tensor, restricted to longitude mode
/// m, is g(cos theta) when m + k is even and sin(theta) g(cos theta) when m + k
/// is odd, with g smooth (a polynomial for band-limited data). The field is
/// split into its even-m and odd-m longitude parts (shift by half a turn),
/// each part is reduced to g, and g is differentiated with the barycentric
/// matrix. `rank` is the tensor rank the component belongs to (0 for scalars).
inline ScalarField d_theta(const ScalarField& f, int rank = 0)
{
  const auto& g = *f.grid();
  const int nt = g.n_theta(), np = g.n_phi(), half = np / 2;
  const Array& v = f.values();
  Array shifted(nt, np);
  shifted.leftCols(np - half) = v.rightCols(np - half);
  shifted.rightCols(half) = v.leftCols(half);
  const Array even_m = 0.5 * (v + shifted);
  const Array odd_m = 0.5 * (v - shifted);

  const Matrix& dx = g.x_derivative();
  const auto s = g.sin_theta().array();
  const auto c = g.x_nodes().array();

  auto polynomial_part = [&](const Array& part) -> Array {
    Array d = (dx * part.matrix()).array();
    return -(d.colwise() * s);
  };
  auto sine_part = [&](const Array& part) -> Array {
    const Array q = part.colwise() / s;
    const Array dq = (dx * q.matrix()).array();
    return q.colwise() * c - dq.colwise() * (s * s);
  };

  const bool rank_odd = (rank % 2) != 0;
  Array out = rank_odd ? Array(sine_part(even_m) + polynomial_part(odd_m))
                       : Array(polynomial_part(even_m) + sine_part(odd_m));
  return ScalarField(f.grid(), std::move(out));
}

using Vec3Field = std::array<ScalarField, 3>;

/// Cartesian components of the tangential gradient of f, computed exactly in
/// coefficient space (degree <= grid max_degree()):
///   K = x cross grad  (the rotation generators, K = i L),
///   grad_S f = -x cross (K f).
/// Nothing is divided by sin(theta), so roundoff grows only like the degree.
inline Vec3Field tangential_gradient(const ScalarField& f)
{
  const auto& grid = f.grid();
  const int n = grid->max_degree();
  SpectralCoeffs a = detail::analyze_to_degree(f, n);
  detail::chop(a);
  SpectralCoeffs kx(n), ky(n), kz(n);
  const Complex I(0.0, 1.0);
  for (int l = 0; l <= n; ++l)
    for (int m = 0; m <= l; ++m) {
      // (L+ f)_{l,m} = sqrt((l-m+1)(l+m)) a_{l,m-1},  (L- f)_{l,m} = sqrt((l+m+1)(l-m)) a_{l,m+1}
      const Complex raise = (m - 1 >= -l) ? std::sqrt((l - m + 1.0) * (l + m)) * a.at(l, m - 1) : Complex(0.0);
      const Complex lower = (m + 1 <= l) ? std::sqrt((l + m + 1.0) * (l - m)) * a.at(l, m + 1) : Complex(0.0);
      kx.at(l, m) = 0.5 * I * (raise + lower);
      ky.at(l, m) = 0.5 * (raise - lower);
      kz.at(l, m) = I * static_cast<double>(m) * a.at(l, m);
    }
  const ScalarField Kx = detail::synthesize_any_degree(kx, grid);
  const ScalarField Ky = detail::synthesize_any_degree(ky, grid);
  const ScalarField Kz = detail::synthesize_any_degree(kz, grid);
  const Array& X = grid->cartesian(0);
  const Array& Y = grid->cartesian(1);
  const Array& Z = grid->cartesian(2);
  // -(x cross K)
  return {ScalarField(grid, Z * Ky.values() - Y * Kz.values()), ScalarField(grid, X * Kz.values() - Z * Kx.values()),
          ScalarField(grid, Y * Kx.values() - X * Ky.values())};
}

inline double integrate_sphere(const ScalarField& f)
{
  const auto& g = *f.grid();
  const double dphi = 2.0 * std::numbers::pi / g.n_phi();
  double total = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) total += g.quad_weights()[i] * dphi * f.values().row(i).sum();
  return total;
}

/// Real orthonormal harmonic: sqrt(2) Re Y_lm (m > 0), Y_l0 (m = 0),
/// sqrt(2) Im Y_l|m| (m < 0).
inline ScalarField real_ylm(const GridPtr& grid, int l, int m)
{
  if (l > grid->L() || std::abs(m) > l) throw std::invalid_argument("real_ylm: (l, m) outside grid band limit");
  SpectralCoeffs c(l);
  const double sign = (std::abs(m) % 2 == 0) ? 1.0 : -1.0;
  if (m == 0) {
    c.at(l, 0) = 1.0;
  } else if (m > 0) {
    c.at(l, m) = 1.0 / std::sqrt(2.0);
    c.at(l, -m) = sign / std::sqrt(2.0);
  } else {
    c.at(l, -m) = Complex(0.0, -1.0 / std::sqrt(2.0));
    c.at(l, m) = sign * Complex(0.0, 1.0 / std::sqrt(2.0));
  }
  return sh_synthesize(c, grid);
}

namespace detail {

/// Uniform in [-1, 1) from the raw 64-bit engine output, so the sequence does
/// not depend on the standard library's distribution implementation.
inline double uniform_pm1(std::mt19937_64& rng) { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; }

inline void check_positive_data(double floor, double amplitude)
{
  if (!(floor > 0.0)) throw std::invalid_argument("random data: floor must be > 0");
  if (amplitude < 0.0) throw std::invalid_argument("random data: amplitude must be >= 0");
  if (amplitude >= floor)
    throw std::invalid_argument("random data: amplitude must be < floor so that v stays positive");
}

}  // namespace detail

/// v = floor + p with p band-limited to l_max, coefficients ~ l^-2 with
/// pseudorandom phases, rescaled so that max |p| on the grid equals amplitude.
inline ScalarField random_band_limited(std::uint64_t seed, int l_max, double floor, double amplitude,
                                       const GridPtr& grid)
{
  detail::check_positive_data(floor, amplitude);
  if (l_max < 0 || 4 * l_max > grid->L())
    throw std::invalid_argument("random_band_limited: need 0 <= l_max <= L/4, got l_max = " + std::to_string(l_max) +
                                " for L = " + std::to_string(grid->L()));
  auto v = ScalarField::constant(grid, floor);
  if (l_max == 0 || amplitude == 0.0) return v;

  std::mt19937_64 rng(seed);
  SpectralCoeffs c(l_max);
  for (int l = 1; l <= l_max; ++l) {
    const double decay = 1.0 / (static_cast<double>(l) * l);
    for (int m = 0; m <= l; ++m) {
      const double re = detail::uniform_pm1(rng) * decay;
      const double im = (m == 0) ? 0.0 : detail::uniform_pm1(rng) * decay;
      c.at(l, m) = Complex(re, im);
      if (m > 0) c.at(l, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * Complex(re, -im);
    }
  }
  auto p = sh_synthesize(c, grid);
  const double peak = p.sup_norm();
  if (peak > 0.0) p *= amplitude / peak;
  return v + p;
}

/// Smooth but not band-limited data: v = floor + amplitude * sum_k c_k K(n_k . x) / bound,
/// where K is the Poisson-type kernel (1 - r^2) / (1 - 2 r t + r^2)^{3/2}, whose
/// harmonic coefficients decay like (2l + 1) r^l. The normalization uses the
/// analytic bound of the kernel, so the field is the same function on every grid.
inline ScalarField random_analytic(std::uint64_t seed, double floor, double amplitude, double radius, int n_kernels,
                                   const GridPtr& grid)
{
  detail::check_positive_data(floor, amplitude);
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("random_analytic: radius must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  struct Kernel
  {
    double weight, nx, ny, nz;
  };
  std::vector<Kernel> kernels;
  double bound = 0.0;
  const double kernel_max = (1.0 + radius) / ((1.0 - radius) * (1.0 - radius));
  for (int k = 0; k < n_kernels; ++k) {
    double nx = 0, ny = 0, nz = 0, norm = 0;
    do {
      nx = detail::uniform_pm1(rng);
      ny = detail::uniform_pm1(rng);
      nz = detail::uniform_pm1(rng);
      norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    } while (norm < 0.1 || norm > 1.0);
    const double weight = detail::uniform_pm1(rng);
    kernels.push_back({weight, nx / norm, ny / norm, nz / norm});
    bound += std::abs(weight) * kernel_max;
  }
  const double r2 = radius * radius;
  return ScalarField::sample_xyz(grid, [&](double x, double y, double z) {
    double sum = 0.0;
    for (const auto& k : kernels) {
      const double t = k.nx * x + k.ny * y + k.nz * z;
      sum += k.weight * (1.0 - r2) / std::pow(1.0 - 2.0 * radius * t + r2, 1.5);
    }
    return floor + amplitude * sum / bound;
  });
}

/// Parse a coefficient list [{"l":..,"m":..,"re":..,"im":..}, ...]. Unlisted
/// coefficients are zero except that a missing conjugate partner is implied
/// by the real-field symmetry; listing both halves inconsistently is an error.
inline SpectralCoeffs coefficients_from_json(const nlohmann::json& doc, int band_limit)
{
  if (!doc.is_array()) throw std::invalid_argument("coefficient file: top level must be a JSON array");
  SpectralCoeffs c(band_limit);
  std::vector<char> listed(static_cast<std::size_t>((band_limit + 1) * (band_limit + 1)), 0);
  for (const auto& rec : doc) {
    if (!rec.is_object() || !rec.contains("l") || !rec.contains("m") || !rec.contains("re") || !rec.contains("im"))
      throw std::invalid_argument("coefficient file: each record needs l, m, re, im");
    const int l = rec.at("l").get<int>();
    const int m = rec.at("m").get<int>();
    if (l < 0 || l > band_limit || std::abs(m) > l)
      throw std::invalid_argument("coefficient file: (l, m) = (" + std::to_string(l) + ", " + std::to_string(m) +
                                  ") outside 0 <= l <= " + std::to_string(band_limit) + ", |m| <= l");
    c.at(l, m) = Complex(rec.at("re").get<double>(), rec.at("im").get<double>());
    listed[static_cast<std::size_t>(l * l + l + m)] = 1;
  }
  for (int l = 0; l <= band_limit; ++l) {
    if (listed[static_cast<std::size_t>(l * l + l)] && std::abs(c.at(l, 0).imag()) > 1e-14 * (1.0 + std::abs(c.at(l, 0))))
      throw std::invalid_argument("coefficient file: a_{l,0} must be real for a real field");
    for (int m = 1; m <= l; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const bool pos = listed[static_cast<std::size_t>(l * l + l + m)];
      const bool neg = listed[static_cast<std::size_t>(l * l + l - m)];
      if (pos && !neg) c.at(l, -m) = sign * std::conj(c.at(l, m));
      if (neg && !pos) c.at(l, m) = sign * std::conj(c.at(l, -m));
      if (pos && neg) {
        const double defect = std::abs(c.at(l, -m) - sign * std::conj(c.at(l, m)));
        if (defect > 1e-12 * (1.0 + std::abs(c.at(l, m))))
          throw std::invalid_argument("coefficient file: a_{l,-m} inconsistent with a real field at l = " +
                                      std::to_string(l) + ", m = " + std::to_string(m));
      }
    }
  }
  return c;
}

inline SpectralCoeffs read_coefficient_file(const std::string& path, int band_limit)
{
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open coefficient file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("coefficient file " + path + ": " + e.what());
  }
  return coefficients_from_json(doc, band_limit);
}

}  // namespace sphflow
