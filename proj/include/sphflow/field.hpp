#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "sphflow/grid.hpp"

namespace sphflow {

using Array = Eigen::ArrayXXd;

/// Real function sampled on a SphereGrid (n_theta x n_phi). The grid is
/// shared and never changes for the lifetime of the field.
class ScalarField
{
 public:
  explicit ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(Array::Zero(grid_->n_theta(), grid_->n_phi())) {}

  ScalarField(GridPtr grid, Array values) : grid_(std::move(grid)), values_(std::move(values))
  {
    if (values_.rows() != grid_->n_theta() || values_.cols() != grid_->n_phi())
      throw std::invalid_argument("ScalarField: value shape does not match grid");
  }

  static ScalarField constant(const GridPtr& grid, double c)
  {
    return ScalarField(grid, Array::Constant(grid->n_theta(), grid->n_phi(), c));
  }

  /// Sample fn(theta, phi) at every node.
  template <typename Fn>
  static ScalarField sample(const GridPtr& grid, Fn&& fn)
  {
    Array a(grid->n_theta(), grid->n_phi());
    for (int i = 0; i < grid->n_theta(); ++i)
      for (int j = 0; j < grid->n_phi(); ++j) a(i, j) = fn(grid->theta_nodes()[i], grid->phi_nodes()[j]);
    return ScalarField(grid, std::move(a));
  }

  /// Sample fn(x1, x2, x3) at the embedded unit-sphere points.
  template <typename Fn>
  static ScalarField sample_xyz(const GridPtr& grid, Fn&& fn)
  {
    return sample(grid, [&](double th, double ph) {
      const double s = std::sin(th);
      return fn(s * std::cos(ph), s * std::sin(ph), std::cos(th));
    });
  }

  const GridPtr& grid() const { return grid_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  double sup_norm() const { return values_.abs().maxCoeff(); }
  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }
  bool all_finite() const { return values_.allFinite(); }

  template <typename Fn>
  ScalarField map(Fn&& fn) const
  {
    return ScalarField(grid_, values_.unaryExpr(std::forward<Fn>(fn)));
  }

  ScalarField& operator+=(const ScalarField& o)
  {
    check_same_grid(o);
    values_ += o.values_;
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o)
  {
    check_same_grid(o);
    values_ -= o.values_;
    return *this;
  }
  ScalarField& operator*=(const ScalarField& o)
  {
    check_same_grid(o);
    values_ *= o.values_;
    return *this;
  }
  ScalarField& operator*=(double s)
  {
    values_ *= s;
    return *this;
  }

  void check_same_grid(const ScalarField& o) const
  {
    if (grid_ != o.grid_) throw std::invalid_argument("ScalarField: operands live on different grids");
  }

 private:
  GridPtr grid_;
  Array values_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
inline ScalarField operator*(ScalarField a, double s) { return a *= s; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator-(ScalarField a)
{
  a.values() = -a.values();
  return a;
}
inline ScalarField operator+(ScalarField a, double s)
{
  a.values() += s;
  return a;
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b)
{
  a.check_same_grid(b);
  return ScalarField(a.grid(), a.values() / b.values());
}

}  // namespace sphflow
