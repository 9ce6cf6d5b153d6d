#pragma once

// Gauss-Legendre x equispaced-longitude collocation grid on the unit sphere,
// together with the tables every transform and derivative on it reuses.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sphflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

/// Nodes (ascending in x) and weights of the n-point Gauss-Legendre rule on
/// [-1, 1]. Newton iteration on the three-term recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged root for the weight
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace detail

/// Collocation grid for band limit L. Rows of every grid function are
/// colatitude rings (theta increasing, so x = cos(theta) decreasing); columns
/// are longitudes phi_j = 2 pi j / n_phi.
class SphereGrid
{
 public:
  SphereGrid(int band_limit, int oversample)
  {
    if (band_limit < 4)
      throw std::invalid_argument("band limit L must be >= 4, got " + std::to_string(band_limit));
    if (oversample < 2)
      throw std::invalid_argument("oversample must be >= 2, got " + std::to_string(oversample));
    L_ = band_limit;
    oversample_ = oversample;
    n_theta_ = oversample * (L_ + 1);
    n_phi_ = oversample * (2 * L_ + 1);
    if (n_phi_ % 2 != 0) ++n_phi_;

    std::vector<double> xa, wa;
    detail::gauss_legendre(n_theta_, xa, wa);
    // theta ascending <=> x descending
    x_.resize(n_theta_);
    weights_.resize(n_theta_);
    theta_.resize(n_theta_);
    sin_.resize(n_theta_);
    cot_.resize(n_theta_);
    for (int i = 0; i < n_theta_; ++i) {
      x_[i] = xa[n_theta_ - 1 - i];
      weights_[i] = wa[n_theta_ - 1 - i];
      theta_[i] = std::acos(x_[i]);
      sin_[i] = std::sqrt((1.0 - x_[i]) * (1.0 + x_[i]));
      cot_[i] = x_[i] / sin_[i];
    }
    phi_.resize(n_phi_);
    for (int j = 0; j < n_phi_; ++j) phi_[j] = 2.0 * std::numbers::pi * j / n_phi_;

    build_x_derivative();
    build_phi_derivative();
    build_fourier_tables();
    build_legendre_table();
    build_embedding();
  }

  int L() const { return L_; }
  int oversample() const { return oversample_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }

  const Vector& theta_nodes() const { return theta_; }
  const Vector& x_nodes() const { return x_; }
  const Vector& quad_weights() const { return weights_; }
  const Vector& phi_nodes() const { return phi_; }
  const Vector& sin_theta() const { return sin_; }
  const Vector& cot_theta() const { return cot_; }

  /// Barycentric collocation derivative d/dx at the Gauss nodes.
  const Matrix& x_derivative() const { return dx_; }
  /// Trigonometric-interpolant derivative d/dphi; apply as F * phi_derivative_T().
  const Matrix& phi_derivative_T() const { return dphi_t_; }

  /// n_phi x (max_degree+1) tables of cos(m phi_j), sin(m phi_j).
  const Matrix& cos_table() const { return cos_; }
  const Matrix& sin_table() const { return sinm_; }

  /// Normalized associated Legendre values up to max_degree(); row i = node,
  /// column = lm_index(l, m), m >= 0.
  const Matrix& legendre() const { return plm_; }
  static int lm_index(int l, int m) { return l * (l + 1) / 2 + m; }

  double quad_weight_sum() const { return weights_.sum(); }

  /// Embedded coordinate x_axis (axis 0, 1, 2) at every node.
  const Eigen::ArrayXXd& cartesian(int axis) const { return xyz_.at(static_cast<std::size_t>(axis)); }
  /// Cartesian component `axis` of frame vector e_i (e_0 = d/dtheta, e_1 = d/dphi / sin).
  const Eigen::ArrayXXd& frame_vector(int i, int axis) const { return frame_.at(static_cast<std::size_t>(3 * i + axis)); }

  /// Transforms are tabulated up to this degree (L plus one per derivative a
  /// rank-4 tensor can have seen), so the Cartesian components of derivatives
  /// of degree-L data are analyzed without truncation.
  static constexpr int kExtraDegree = 4;
  int max_degree() const { return L_ + kExtraDegree; }

 private:
  void build_x_derivative()
  {
    // barycentric weights of Gauss-Legendre nodes: (-1)^i sqrt((1-x_i^2) w_i)
    Vector lam(n_theta_);
    for (int i = 0; i < n_theta_; ++i)
      lam[i] = ((i % 2 == 0) ? 1.0 : -1.0) * sin_[i] * std::sqrt(weights_[i]);
    dx_ = Matrix::Zero(n_theta_, n_theta_);
    for (int i = 0; i < n_theta_; ++i) {
      double diag = 0.0;
      for (int j = 0; j < n_theta_; ++j) {
        if (i == j) continue;
        dx_(i, j) = (lam[j] / lam[i]) / (x_[i] - x_[j]);
        diag -= dx_(i, j);
      }
      dx_(i, i) = diag;
    }
  }

  void build_phi_derivative()
  {
    const double h = 2.0 * std::numbers::pi / n_phi_;
    Matrix d = Matrix::Zero(n_phi_, n_phi_);
    for (int j = 0; j < n_phi_; ++j)
      for (int k = 0; k < n_phi_; ++k) {
        if (j == k) continue;
        const int diff = j - k;
        const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
        d(j, k) = 0.5 * sign / std::tan(diff * h / 2.0);
      }
    dphi_t_ = d.transpose();
  }

  void build_fourier_tables()
  {
    cos_.resize(n_phi_, max_degree() + 1);
    sinm_.resize(n_phi_, max_degree() + 1);
    for (int j = 0; j < n_phi_; ++j)
      for (int m = 0; m <= max_degree(); ++m) {
        // reduce m*j mod n_phi before the angle to keep the argument small
        const double ang = 2.0 * std::numbers::pi * static_cast<double>((m * j) % n_phi_) / n_phi_;
        cos_(j, m) = std::cos(ang);
        sinm_(j, m) = std::sin(ang);
      }
  }

  void build_legendre_table()
  {
    const int top = max_degree();
    const int nlm = (top + 1) * (top + 2) / 2;
    plm_.resize(n_theta_, nlm);
    for (int i = 0; i < n_theta_; ++i) {
      const double x = x_[i], s = sin_[i];
      double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
      for (int m = 0; m <= top; ++m) {
        if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        plm_(i, lm_index(m, m)) = pmm;
        if (m == top) break;
        double p_prev = pmm;
        double p_cur = std::sqrt(2.0 * m + 3.0) * x * pmm;
        plm_(i, lm_index(m + 1, m)) = p_cur;
        for (int l = m + 2; l <= top; ++l) {
          const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
          const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
          const double p_next = a * (x * p_cur - b * p_prev);
          plm_(i, lm_index(l, m)) = p_next;
          p_prev = p_cur;
          p_cur = p_next;
        }
      }
    }
  }

  void build_embedding()
  {
    xyz_.assign(3, Eigen::ArrayXXd(n_theta_, n_phi_));
    frame_.assign(6, Eigen::ArrayXXd(n_theta_, n_phi_));
    for (int i = 0; i < n_theta_; ++i)
      for (int j = 0; j < n_phi_; ++j) {
        const double cp = std::cos(phi_[j]), sp = std::sin(phi_[j]);
        xyz_[0](i, j) = sin_[i] * cp;
        xyz_[1](i, j) = sin_[i] * sp;
        xyz_[2](i, j) = x_[i];
        frame_[0](i, j) = x_[i] * cp;
        frame_[1](i, j) = x_[i] * sp;
        frame_[2](i, j) = -sin_[i];
        frame_[3](i, j) = -sp;
        frame_[4](i, j) = cp;
        frame_[5](i, j) = 0.0;
      }
  }

  int L_ = 0;
  int oversample_ = 0;
  int n_theta_ = 0;
  int n_phi_ = 0;
  Vector theta_, x_, weights_, phi_, sin_, cot_;
  Matrix dx_, dphi_t_, cos_, sinm_, plm_;
  std::vector<Eigen::ArrayXXd> xyz_, frame_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

inline GridPtr build_grid(int band_limit, int oversample = 2)
{
  return std::make_shared<const SphereGrid>(band_limit, oversample);
}

}  // namespace sphflow
