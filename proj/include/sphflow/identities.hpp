#pragma once

// Pointwise evaluation of the Q-evolution identity, the Harnack-type identity
// with phi = log v, the fourth-order inequality, and the J_alpha energies.
// Unless a metric is named, Lap, grad, traces and norms are those of g_{S^2};
// the evolving metric is g = (1/v) g_{S^2}.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphflow/flow.hpp"

namespace sphflow {

struct ResidualReport
{
  std::string name;
  int L = 0;
  int l_max_data = 0;
  double sup_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

inline ResidualReport make_report(std::string name, const GridPtr& grid, int l_max_data, double sup_residual,
                                  double rel_residual, double tolerance)
{
  ResidualReport r;
  r.name = std::move(name);
  r.L = grid->L();
  r.l_max_data = l_max_data;
  r.sup_residual = sup_residual;
  r.rel_residual = rel_residual;
  r.tolerance = tolerance;
  r.passed = std::isfinite(rel_residual) && rel_residual <= tolerance;
  return r;
}

/// Sum of the two largest entries.
inline double two_largest(std::vector<double> xs)
{
  std::sort(xs.begin(), xs.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, xs.size()); ++i) s += xs[i];
  return s;
}

// ---------------------------------------------------------------------------
// b = S(nabla^3 v), TF(b), z

struct BTensors
{
  FrameTensor b;
  FrameTensor tfb;
  FrameTensor z;
};

inline BTensors b_operator(const ScalarField& v)
{
  auto b = symmetrize3(iterated_derivative(v, 3));
  auto [tfb, z] = tf3(b);
  return {std::move(b), std::move(tfb), std::move(z)};
}

/// TF(S(nabla^3 u)); linear in u.
inline FrameTensor tf_b(const ScalarField& u) { return b_operator(u).tfb; }

/// sup v * sup |nabla^3 v|^2, the size Q would have if nothing cancelled.
inline double q_natural_scale(const ScalarField& v)
{
  return v.sup_norm() * std::pow(iterated_derivative(v, 3).sup_norm(), 2);
}

/// Q = v |TF(b)|^2.
inline ScalarField q_field(const ScalarField& v)
{
  require_positive(v, "q_field");
  return v * norm_sq(tf_b(v));
}

/// dQ/dt along the flow, by linearity of u -> TF(S(nabla^3 u)):
///   w |B[v]|^2 + 2 v <B[w], B[v]>,  w = dv/dt.
inline ScalarField q_lhs(const ScalarField& v)
{
  require_positive(v, "q_lhs");
  const auto w = flow_rhs(v);
  const auto bv = tf_b(v);
  const auto bw = tf_b(w);
  return w * norm_sq(bv) + 2.0 * (v * inner(bw, bv));
}

struct QRhsTerms
{
  ScalarField v_lap_q;     ///< v Lap Q
  ScalarField four_r_q;    ///< 4 R Q
  ScalarField chat_term;   ///< 2 |chat(v nabla TF(b) + 2 dv x TF(b))|^2
  ScalarField hess_term;   ///< (1/2) |v TF(nabla^2(Lap v + 6 v)) - 2 tr^{0,1}(dv x TF(b))|^2
  ScalarField rhs;
  FrameTensor chat;
  FrameTensor hess_tensor;  ///< the 2-tensor inside hess_term
};

/// Metric used for the trace tr^{1,2}(dv x TF(b)) inside the last term.
/// Round is the reading under which the identity closes; Evolving
/// (g = (1/v) g_{S^2}, i.e. v times the round trace) leaves an O(1e-2)
/// relative defect that does not shrink with L.
enum class QTrace { Round, Evolving };

/// Right side of the Q-evolution identity, term by term.
inline QRhsTerms q_rhs_terms(const ScalarField& v, QTrace trace = QTrace::Round)
{
  require_positive(v, "q_rhs");
  const auto tfb = tf_b(v);
  const auto q = v * norm_sq(tfb);
  const auto r = scalar_curvature(v);
  const auto dv = covariant_derivative(FrameTensor::scalar(v));

  auto c = v * covariant_derivative(tfb) + 2.0 * tensor_product(dv, tfb);
  auto chat = detail::decompose4_unchecked(c).chat;

  const auto h = laplacian(v) + 6.0 * v;
  // symmetric part; the antisymmetric remainder is truncation error only
  auto hess_h = iterated_derivative(h, 2);
  hess_h[1] = 0.5 * (hess_h[1] + hess_h[2]);
  hess_h[2] = hess_h[1];
  const Metric metric = trace == QTrace::Round ? Metric{RoundMetric{}} : evolving(v);
  auto m = v * tf2(hess_h) - 2.0 * trace_pair(tensor_product(dv, tfb), 0, 1, metric);

  QRhsTerms t{v * laplacian(q), 4.0 * (r * q), 2.0 * norm_sq(chat), 0.5 * norm_sq(m),
              ScalarField(v.grid()), std::move(chat), std::move(m)};
  t.rhs = t.v_lap_q - t.four_r_q - t.chat_term - t.hess_term;
  return t;
}

inline ScalarField q_rhs(const ScalarField& v, QTrace trace = QTrace::Round) { return q_rhs_terms(v, trace).rhs; }

/// sup(v)^2 (sup|nabla^3 v|^2 + sup(v)^2): the size of dQ/dt without
/// cancellation, kept positive for constant v.
inline double q_rate_scale(const ScalarField& v)
{
  const double vmax = v.sup_norm();
  return vmax * vmax * (std::pow(iterated_derivative(v, 3).sup_norm(), 2) + vmax * vmax);
}

/// sup |q_lhs - q_rhs| relative to the two largest terms of the identity plus
/// q_rate_scale as a guard, so the ratio stays meaningful when every term
/// vanishes (round and King-Rosenau data).
inline ResidualReport q_residual(const ScalarField& v, std::string name, int l_max_data, double tol = 1e-6,
                                 QTrace trace = QTrace::Round)
{
  const auto lhs = q_lhs(v);
  const auto t = q_rhs_terms(v, trace);
  const double sup_res = (lhs - t.rhs).sup_norm();
  const double guard = q_rate_scale(v);
  const double denom = two_largest({lhs.sup_norm(), t.v_lap_q.sup_norm(), t.four_r_q.sup_norm(), t.chat_term.sup_norm(),
                                    t.hess_term.sup_norm()}) +
                       guard;
  return make_report(std::move(name), v.grid(), l_max_data, sup_res, sup_res / denom, tol);
}

// ---------------------------------------------------------------------------
// Harnack quantity with phi = log v

struct HarnackTerms
{
  ScalarField r;          ///< scalar curvature of g
  ScalarField lap_g_phi;  ///< Lap_g phi = v Lap(log v)
  ScalarField a;          ///< A
  FrameTensor dphi;
};

namespace detail {

inline void require_positive_curvature(const ScalarField& r, const char* who)
{
  const auto& vals = r.values();
  Eigen::Index i = 0, j = 0;
  const double rmin = vals.minCoeff(&i, &j);
  if (!(rmin > 0.0)) {
    std::ostringstream os;
    os << who << ": scalar curvature must be positive, R = " << rmin << " at grid point (" << i << ", " << j
       << "), theta = " << r.grid()->theta_nodes()[i] << ", phi = " << r.grid()->phi_nodes()[j];
    throw std::domain_error(os.str());
  }
}

}  // namespace detail

/// A = Lap_g R + R^2 - |grad R|_g^2 / R + |grad R + R grad phi|_g^2 / R
///     + 2 |Hess_g phi - (1/2) Lap_g phi g|_g^2.
/// Conformal rules for g = (1/v) g_{S^2}: Lap_g = v Lap, |1-form|_g^2 = v |.|^2,
/// |2-tensor|_g^2 = v^2 |.|^2, and with u = -(1/2) log v,
///   Hess_g f = Hess f - du x df - df x du + <grad u, grad f> g_{S^2}.
inline HarnackTerms harnack_terms(const ScalarField& v)
{
  require_positive(v, "harnack_A");
  const auto r = scalar_curvature(v);
  detail::require_positive_curvature(r, "harnack_A");
  const auto phi = v.map([](double x) { return std::log(x); });
  const auto lap_phi = laplacian(phi);
  const auto lap_g_phi = v * lap_phi;

  const auto dphi = covariant_derivative(FrameTensor::scalar(phi));
  const auto dr = covariant_derivative(FrameTensor::scalar(r));
  const auto g0 = FrameTensor::round_metric(v.grid());
  const auto du = dphi * -0.5;
  const auto hess_g_phi = covariant_derivative(dphi) - tensor_product(du, dphi) - tensor_product(dphi, du) +
                          inner(du, dphi) * g0;
  // (1/2) Lap_g phi g = (1/2) v Lap phi (1/v) g_{S^2}
  const auto trace_free = hess_g_phi - (0.5 * lap_phi) * g0;
  const auto shifted = dr + r * dphi;

  auto a = v * laplacian(r) + r * r - v * norm_sq(dr) / r + v * norm_sq(shifted) / r +
           2.0 * (v * v * norm_sq(trace_free));
  return {r, lap_g_phi, std::move(a), dphi};
}

inline ScalarField harnack_A(const ScalarField& v) { return harnack_terms(v).a; }

/// D = Lap(Lap v + 6 v) + 4 v.
inline ScalarField fourth_order_quantity(const ScalarField& v) { return laplacian(laplacian(v) + 6.0 * v) + 4.0 * v; }

/// Lap_g phi - R + 2 v, which vanishes for every positive v.
inline ResidualReport sentinel_residual(const ScalarField& v, int l_max_data, double tol = 1e-8)
{
  require_positive(v, "sentinel");
  const auto phi = v.map([](double x) { return std::log(x); });
  const auto lap_g_phi = v * laplacian(phi);
  const auto r = scalar_curvature(v);
  const double sup_res = (lap_g_phi - r + 2.0 * v).sup_norm();
  const double denom = two_largest({lap_g_phi.sup_norm(), r.sup_norm(), 2.0 * v.sup_norm()});
  return make_report("sentinel_lap_g_phi_minus_R", v.grid(), l_max_data, sup_res, sup_res / denom, tol);
}

/// A against v (Lap(Lap v + 6 v) + 4 v).
inline ResidualReport a_reduction_residual(const ScalarField& v, int l_max_data, double tol = 1e-7)
{
  const auto a = harnack_A(v);
  const auto reduced = v * fourth_order_quantity(v);
  const double sup_res = (a - reduced).sup_norm();
  return make_report("a_reduction", v.grid(), l_max_data, sup_res, sup_res / std::max(a.sup_norm(), reduced.sup_norm()),
                     tol);
}

/// Lap_g(R + |grad phi|_g^2) = A + 2 g(grad(Lap_g phi - R), grad phi) + (Lap_g phi)^2 - R^2,
/// both sides assembled independently.
inline ResidualReport remark_identity_residual(const ScalarField& v, int l_max_data, double tol = 1e-7,
                                               std::string name = "remark_identity")
{
  const auto h = harnack_terms(v);
  const auto lhs = v * laplacian(h.r + v * norm_sq(h.dphi));
  const auto grad_diff = covariant_derivative(FrameTensor::scalar(h.lap_g_phi - h.r));
  const auto cross = 2.0 * (v * inner(grad_diff, h.dphi));
  const auto sq = h.lap_g_phi * h.lap_g_phi;
  const auto r2 = h.r * h.r;
  const auto rhs = h.a + cross + sq - r2;
  const double sup_res = (lhs - rhs).sup_norm();
  const double denom =
      two_largest({lhs.sup_norm(), h.a.sup_norm(), cross.sup_norm(), sq.sup_norm(), r2.sup_norm()});
  return make_report(std::move(name), v.grid(), l_max_data, sup_res, sup_res / denom, tol);
}

struct FourthOrderCheck
{
  double lhs_min = 0.0;                 ///< min over the grid of Lap(Lap v + 6 v) + 4 v
  std::optional<ResidualReport> report;  ///< A = v D, only when R > 0 everywhere
};

inline FourthOrderCheck fourth_order_check(const ScalarField& v, int l_max_data, double tol = 1e-7)
{
  require_positive(v, "fourth_order_check");
  FourthOrderCheck out;
  out.lhs_min = fourth_order_quantity(v).min();
  if (scalar_curvature(v).min() > 0.0) out.report = a_reduction_residual(v, l_max_data, tol);
  return out;
}

// ---------------------------------------------------------------------------
// J_alpha

namespace detail {

inline bool is_alpha_two(double alpha) { return std::abs(alpha - 2.0) < 1e-12; }

}  // namespace detail

/// F_alpha(v) = -4/(2 - alpha) v^{2 - alpha}, F_2(v) = -4 log v.
inline double f_alpha(double v, double alpha)
{
  if (detail::is_alpha_two(alpha)) return -4.0 * std::log(v);
  return -4.0 / (2.0 - alpha) * std::pow(v, 2.0 - alpha);
}

/// J_alpha = int (|grad v|^2 / v^alpha + F_alpha(v)) dmu.
inline double j_alpha(const ScalarField& v, double alpha)
{
  require_positive(v, "j_alpha");
  const auto grad_sq = grad_norm_sq(v);
  ScalarField integrand(v.grid());
  integrand.values() = grad_sq.values() / v.values().pow(alpha) +
                       v.values().unaryExpr([alpha](double x) { return f_alpha(x, alpha); });
  return integrate_sphere(integrand);
}

/// dJ_alpha/dt = int (-2 v_t - (2 - alpha) |grad v|^2) v_t / v^{alpha + 1} dmu,  v_t = flow_rhs(v).
inline double dj_alpha_formula(const ScalarField& v, double alpha)
{
  require_positive(v, "dj_alpha_formula");
  const auto vt = flow_rhs(v);
  const auto grad_sq = grad_norm_sq(v);
  ScalarField integrand(v.grid());
  integrand.values() =
      (-2.0 * vt.values() - (2.0 - alpha) * grad_sq.values()) * vt.values() / v.values().pow(alpha + 1.0);
  return integrate_sphere(integrand);
}

/// Short label for an alpha value: 0, 1, 2, 0.5.
inline std::string alpha_label(double alpha)
{
  std::ostringstream os;
  os << alpha;
  return os.str();
}

struct JRow
{
  double t = 0.0;
  std::vector<double> j;        ///< J_alpha per alpha
  std::vector<double> formula;  ///< dJ_alpha/dt from the formula
  std::vector<double> fd;       ///< three-point finite difference (NaN at the ends)
};

struct JTable
{
  std::vector<double> alphas;
  std::vector<JRow> rows;
  std::vector<double> max_rel_mismatch;  ///< per alpha, over interior rows
  std::vector<double> max_fd;            ///< per alpha, largest finite-difference dJ/dt
  std::vector<double> max_formula;       ///< per alpha, largest formula value
};

/// Evaluate J_alpha and its formula derivative at every state, and compare
/// the formula with the three-point (non-uniform) difference quotient at
/// interior states.
inline JTable j_monotonicity_report(const std::vector<FlowState>& states, const std::vector<double>& alphas)
{
  if (states.size() < 3) throw std::invalid_argument("j_monotonicity_report: need at least 3 states");
  if (alphas.empty()) throw std::invalid_argument("j_monotonicity_report: no alpha values");
  JTable table;
  table.alphas = alphas;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : states) {
    JRow row;
    row.t = s.t;
    for (double a : alphas) {
      row.j.push_back(j_alpha(s.v, a));
      row.formula.push_back(dj_alpha_formula(s.v, a));
    }
    row.fd.assign(alphas.size(), nan);
    table.rows.push_back(std::move(row));
  }
  const std::size_t na = alphas.size();
  table.max_rel_mismatch.assign(na, 0.0);
  table.max_fd.assign(na, -std::numeric_limits<double>::infinity());
  table.max_formula.assign(na, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 1; i + 1 < table.rows.size(); ++i) {
    const double h1 = table.rows[i].t - table.rows[i - 1].t;
    const double h2 = table.rows[i + 1].t - table.rows[i].t;
    for (std::size_t k = 0; k < na; ++k) {
      const double fm = table.rows[i - 1].j[k], f0 = table.rows[i].j[k], fp = table.rows[i + 1].j[k];
      const double d = -h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * f0 + h1 / (h2 * (h1 + h2)) * fp;
      table.rows[i].fd[k] = d;
      const double ref = table.rows[i].formula[k];
      table.max_rel_mismatch[k] = std::max(table.max_rel_mismatch[k], std::abs(d - ref) / std::abs(ref));
      table.max_fd[k] = std::max(table.max_fd[k], d);
    }
  }
  for (const auto& row : table.rows)
    for (std::size_t k = 0; k < na; ++k) table.max_formula[k] = std::max(table.max_formula[k], row.formula[k]);
  return table;
}

}  // namespace sphflow
