#pragma once

// Named ResidualReports for the verification battery. Each check returns a
// report; a check whose inputs violate a precondition returns a failed
// report with NaN residuals instead of throwing.

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "sphflow/identities.hpp"

namespace sphflow {

namespace detail {

inline ResidualReport failed_report(std::string name, const GridPtr& grid, int l_max_data, double tol,
                                    const std::string& why)
{
  std::cerr << name << ": " << why << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto r = make_report(std::move(name), grid, l_max_data, nan, nan, tol);
  r.passed = false;
  return r;
}

}  // namespace detail

/// Run fn; a domain/argument error becomes a failed report.
inline ResidualReport guarded(const std::string& name, const GridPtr& grid, int l_max_data, double tol,
                              const std::function<ResidualReport()>& fn)
{
  try {
    return fn();
  } catch (const std::domain_error& e) {
    return detail::failed_report(name, grid, l_max_data, tol, e.what());
  } catch (const std::invalid_argument& e) {
    return detail::failed_report(name, grid, l_max_data, tol, e.what());
  }
}

/// 4 z from tf3 against d(Lap v) + (2/3) dv.
inline ResidualReport z_identity_report(const ScalarField& v, std::string name, int l_max_data, double tol = 1e-7)
{
  const auto [b, tfb, z] = b_operator(v);
  const auto rhs = covariant_derivative(FrameTensor::scalar(laplacian(v) + (2.0 / 3.0) * v));
  const auto diff = z * 4.0 - rhs;
  const double sup_res = diff.sup_norm();
  return make_report(std::move(name), v.grid(), l_max_data, sup_res, sup_res / rhs.sup_norm(), tol);
}

/// Largest trace of TF(b) over all slot pairs, relative to sup |b|.
inline ResidualReport tfb_trace_report(const ScalarField& v, int l_max_data, double tol = 1e-9)
{
  const auto [b, tfb, z] = b_operator(v);
  const double worst = max_trace(tfb);
  return make_report("tfb_trace_free", v.grid(), l_max_data, worst, worst / b.sup_norm(), tol);
}

/// Ricci identity defect for omega = dv, relative to sup |nabla^2 omega|.
inline ResidualReport commutator_report(const ScalarField& v, int l_max_data, double tol = 1e-7)
{
  const auto dv = covariant_derivative(FrameTensor::scalar(v));
  const double scale = iterated_derivative(v, 3).sup_norm();
  const double sup_res = commutator_defect(dv).sup_norm();
  return make_report("commutator_defect", v.grid(), l_max_data, sup_res, sup_res / scale, tol);
}

/// c = v nabla TF(b) + 2 dv x TF(b): reconstruction error, |tr e|, and f + e/2.
inline std::vector<ResidualReport> decompose4_reports(const ScalarField& v, int l_max_data, double tol = 1e-10)
{
  const auto grid = v.grid();
  const auto tfb = tf_b(v);
  const auto dv = covariant_derivative(FrameTensor::scalar(v));
  const auto c = v * covariant_derivative(tfb) + 2.0 * tensor_product(dv, tfb);
  const double scale = c.sup_norm();
  std::vector<ResidualReport> out;
  try {
    const auto d = decompose4(c);
    const double rec = (reconstruct4(d) - c).sup_norm();
    out.push_back(make_report("decompose4_reconstruction", grid, l_max_data, rec, rec / scale, tol));
    const double tr_e = trace_pair(d.e, 0, 1).sup_norm();
    out.push_back(make_report("decompose4_trace_e", grid, l_max_data, tr_e, tr_e / scale, tol));
    const double fe = (d.f + d.e * 0.5).sup_norm();
    out.push_back(make_report("decompose4_f_equals_minus_half_e", grid, l_max_data, fe, fe / scale, 0.0));
  } catch (const std::domain_error& e) {
    for (const char* n : {"decompose4_reconstruction", "decompose4_trace_e", "decompose4_f_equals_minus_half_e"})
      out.push_back(detail::failed_report(n, grid, l_max_data, tol, e.what()));
  }
  return out;
}

/// sup Q / (sup v * sup |nabla^3 v|^2).
inline ResidualReport q_vanishing_report(const ScalarField& v, std::string name, int l_max_data, double tol = 1e-9)
{
  const double sup_q = q_field(v).sup_norm();
  const double scale = q_natural_scale(v);
  return make_report(std::move(name), v.grid(), l_max_data, sup_q, scale > 0 ? sup_q / scale : sup_q, tol);
}

/// Both squared terms of the Q identity and its residual, against q_rate_scale.
/// For data on which Q vanishes identically (constants, l <= 1, King-Rosenau).
inline ResidualReport q_squared_terms_report(const ScalarField& v, std::string name, int l_max_data,
                                             double tol = 1e-9)
{
  const auto lhs = q_lhs(v);
  const auto t = q_rhs_terms(v);
  const double worst =
      std::max({t.chat_term.sup_norm(), t.hess_term.sup_norm(), (lhs - t.rhs).sup_norm(), lhs.sup_norm()});
  return make_report(std::move(name), v.grid(), l_max_data, worst, worst / q_rate_scale(v), tol);
}

/// max(0, -min f) / scale: a one-sided check f >= -tol * scale.
inline ResidualReport nonnegativity_report(const ScalarField& f, double scale, std::string name, int l_max_data,
                                           double tol = 1e-9)
{
  const double neg = std::max(0.0, -f.min());
  return make_report(std::move(name), f.grid(), l_max_data, neg, neg / scale, tol);
}

/// Finite-difference vs formula mismatch per alpha, and the sign of every
/// sampled dJ/dt (dJ <= 1e-12 |J| + 1e-12).
inline std::vector<ResidualReport> j_reports(const JTable& table, const GridPtr& grid, int l_max_data,
                                             double tol = 1e-5)
{
  std::vector<ResidualReport> out;
  for (std::size_t k = 0; k < table.alphas.size(); ++k) {
    const std::string tag = "alpha_" + alpha_label(table.alphas[k]);
    double sup_abs = 0.0;
    for (const auto& row : table.rows) sup_abs = std::max(sup_abs, std::abs(row.formula[k]));
    out.push_back(make_report("j_formula_vs_fd_" + tag, grid, l_max_data, table.max_rel_mismatch[k] * sup_abs,
                              table.max_rel_mismatch[k], tol));
    double excess = 0.0;
    for (const auto& row : table.rows) {
      const double bound = 1e-12 * std::abs(row.j[k]) + 1e-12;
      excess = std::max(excess, row.formula[k] - bound);
      if (std::isfinite(row.fd[k])) excess = std::max(excess, row.fd[k] - bound);
    }
    out.push_back(make_report("j_nonincreasing_" + tag, grid, l_max_data, excess, excess, 0.0));
  }
  return out;
}

}  // namespace sphflow
