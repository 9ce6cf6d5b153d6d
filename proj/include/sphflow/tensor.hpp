#pragma once

// Covariant tensors on the unit round sphere in the orthonormal frame
//   e_0 = d/dtheta,  e_1 = (1/sin theta) d/dphi.
// The only nonzero connection terms are
//   nabla_{e_1} e_0 = cot(theta) e_1,   nabla_{e_1} e_1 = -cot(theta) e_0.
// Slots are numbered from zero. Component (i_0, ..., i_{k-1}) is stored at
// flat index sum_s i_s 2^{k-1-s}, so the first slot is the most significant bit.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sphflow/spectral.hpp"

namespace sphflow {

inline constexpr int kMaxRank = 4;

class FrameTensor
{
 public:
  FrameTensor(int rank, std::vector<ScalarField> components) : rank_(rank), comps_(std::move(components))
  {
    if (rank_ < 0 || rank_ > kMaxRank) throw std::invalid_argument("FrameTensor: rank must lie in [0, 4]");
    if (comps_.size() != (std::size_t{1} << rank_))
      throw std::invalid_argument("FrameTensor: rank " + std::to_string(rank_) + " needs " +
                                  std::to_string(1 << rank_) + " components");
    for (const auto& c : comps_) comps_.front().check_same_grid(c);
  }

  static FrameTensor zero(const GridPtr& grid, int rank)
  {
    return FrameTensor(rank, std::vector<ScalarField>(std::size_t{1} << rank, ScalarField(grid)));
  }

  static FrameTensor scalar(ScalarField f) { return FrameTensor(0, {std::move(f)}); }

  /// The round metric g_{S^2}: identity in the orthonormal frame.
  static FrameTensor round_metric(const GridPtr& grid)
  {
    auto one = ScalarField::constant(grid, 1.0);
    auto zero = ScalarField(grid);
    return FrameTensor(2, {one, zero, zero, one});
  }

  int rank() const { return rank_; }
  std::size_t size() const { return comps_.size(); }
  const GridPtr& grid() const { return comps_.front().grid(); }

  const ScalarField& operator[](std::size_t flat) const { return comps_[flat]; }
  ScalarField& operator[](std::size_t flat) { return comps_[flat]; }
  const std::vector<ScalarField>& components() const { return comps_; }

  /// Component by explicit frame indices, e.g. t.at({0, 1, 1}).
  const ScalarField& at(std::initializer_list<int> idx) const { return comps_[flat_index(idx)]; }

  std::size_t flat_index(std::initializer_list<int> idx) const
  {
    if (static_cast<int>(idx.size()) != rank_) throw std::invalid_argument("FrameTensor: index arity != rank");
    std::size_t flat = 0;
    for (int i : idx) flat = (flat << 1) | static_cast<std::size_t>(i & 1);
    return flat;
  }

  /// Sup over all components and grid points.
  double sup_norm() const
  {
    double s = 0.0;
    for (const auto& c : comps_) s = std::max(s, c.sup_norm());
    return s;
  }

  FrameTensor& operator+=(const FrameTensor& o)
  {
    check_rank(o);
    for (std::size_t k = 0; k < comps_.size(); ++k) comps_[k] += o.comps_[k];
    return *this;
  }
  FrameTensor& operator-=(const FrameTensor& o)
  {
    check_rank(o);
    for (std::size_t k = 0; k < comps_.size(); ++k) comps_[k] -= o.comps_[k];
    return *this;
  }
  FrameTensor& operator*=(double s)
  {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  /// Pointwise multiplication by a scalar field.
  FrameTensor& operator*=(const ScalarField& f)
  {
    for (auto& c : comps_) c *= f;
    return *this;
  }

  void check_rank(const FrameTensor& o) const
  {
    if (o.rank_ != rank_) throw std::invalid_argument("FrameTensor: rank mismatch");
    if (o.grid() != grid()) throw std::invalid_argument("FrameTensor: grid mismatch");
  }

 private:
  int rank_;
  std::vector<ScalarField> comps_;
};

inline FrameTensor operator+(FrameTensor a, const FrameTensor& b) { return a += b; }
inline FrameTensor operator-(FrameTensor a, const FrameTensor& b) { return a -= b; }
inline FrameTensor operator*(FrameTensor a, double s) { return a *= s; }
inline FrameTensor operator*(double s, FrameTensor a) { return a *= s; }
inline FrameTensor operator*(const ScalarField& f, FrameTensor a) { return a *= f; }

namespace detail {

inline int bit(std::size_t flat, int rank, int slot) { return static_cast<int>((flat >> (rank - 1 - slot)) & 1u); }
inline std::size_t flip(std::size_t flat, int rank, int slot) { return flat ^ (std::size_t{1} << (rank - 1 - slot)); }

/// Flat index of the tensor whose slot `slot` has been removed.
inline std::size_t drop_slot(std::size_t flat, int rank, int slot)
{
  const int low_bits = rank - 1 - slot;
  const std::size_t low = flat & ((std::size_t{1} << low_bits) - 1);
  const std::size_t high = flat >> (low_bits + 1);
  return (high << low_bits) | low;
}

/// Compose a flat index from per-slot frame indices.
template <std::size_t N>
inline std::size_t compose(const std::array<int, N>& idx)
{
  std::size_t flat = 0;
  for (int i : idx) flat = (flat << 1) | static_cast<std::size_t>(i);
  return flat;
}

inline std::atomic<bool>& z_bug_flag()
{
  static std::atomic<bool> flag{false};
  return flag;
}

}  // namespace detail

/// Test-only mutation hook: while an instance is alive, tf3 returns a
/// corrupted trace one-form z. Used as a negative control.
class ScopedZBugInjection
{
 public:
  explicit ScopedZBugInjection(bool enable = true) : previous_(detail::z_bug_flag().exchange(enable)) {}
  ~ScopedZBugInjection() { detail::z_bug_flag().store(previous_); }
  ScopedZBugInjection(const ScopedZBugInjection&) = delete;
  ScopedZBugInjection& operator=(const ScopedZBugInjection&) = delete;

 private:
  bool previous_;
};

namespace detail {

/// Re-express slot components of a tensor in another basis, one slot at a
/// time. Components are stored in mixed radix (first slot most significant)
/// with per-slot base `bases[s]` (2 = frame, 3 = Cartesian).
/// coef(i_new, i_old) is the pointwise factor relating the two bases.
template <typename Coef>
std::vector<Array> change_slot_basis(std::vector<Array> comps, std::vector<int> bases, int new_base, Coef&& coef)
{
  const int rank = static_cast<int>(bases.size());
  for (int slot = 0; slot < rank; ++slot) {
    std::size_t inner = 1;
    for (int s = slot + 1; s < rank; ++s) inner *= static_cast<std::size_t>(bases[s]);
    const std::size_t outer = comps.size() / (inner * static_cast<std::size_t>(bases[slot]));
    const int old_base = bases[slot];
    std::vector<Array> next(outer * static_cast<std::size_t>(new_base) * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (int a = 0; a < new_base; ++a)
        for (std::size_t in = 0; in < inner; ++in) {
          Array acc;
          for (int b = 0; b < old_base; ++b) {
            const Array& src = comps[(o * static_cast<std::size_t>(old_base) + static_cast<std::size_t>(b)) * inner + in];
            if (b == 0)
              acc = coef(a, b) * src;
            else
              acc += coef(a, b) * src;
          }
          next[(o * static_cast<std::size_t>(new_base) + static_cast<std::size_t>(a)) * inner + in] = std::move(acc);
        }
    comps = std::move(next);
    bases[slot] = new_base;
  }
  return comps;
}

}  // namespace detail

/// (nabla T)(W, X_1..X_k) = (nabla_W T)(X_1..X_k); the new slot comes first.
///
/// Computed through the embedding S^2 in R^3: the frame components are lifted
/// to Cartesian components (smooth functions on the sphere), each is
/// differentiated with tangential_gradient, and every slot is contracted back
/// onto the frame. Contracting with the tangent frame is the tangential
/// projection, which is the Levi-Civita connection of the round sphere.
inline FrameTensor covariant_derivative(const FrameTensor& t)
{
  const int k = t.rank();
  if (k >= kMaxRank) throw std::invalid_argument("covariant_derivative: rank " + std::to_string(k) + " input overflows");
  const auto& grid = t.grid();
  auto frame = [&](int i, int a) -> const Array& { return grid->frame_vector(i, a); };

  std::vector<Array> comps;
  comps.reserve(t.size());
  for (const auto& c : t.components()) comps.push_back(c.values());
  // frame -> Cartesian: A_a = sum_i T_i e_i^a
  const auto cart = detail::change_slot_basis(std::move(comps), std::vector<int>(static_cast<std::size_t>(k), 2), 3,
                                              [&](int a, int i) -> const Array& { return frame(i, a); });

  // gradient slot first, Cartesian in every slot
  std::vector<Array> grad(3 * cart.size());
  for (std::size_t alpha = 0; alpha < cart.size(); ++alpha) {
    const auto g = tangential_gradient(ScalarField(grid, cart[alpha]));
    for (int c = 0; c < 3; ++c) grad[static_cast<std::size_t>(c) * cart.size() + alpha] = g[static_cast<std::size_t>(c)].values();
  }
  // Cartesian -> frame on all k+1 slots: T_i = sum_a A_a e_i^a
  auto out = detail::change_slot_basis(std::move(grad), std::vector<int>(static_cast<std::size_t>(k + 1), 3), 2,
                                       [&](int i, int a) -> const Array& { return frame(i, a); });
  std::vector<ScalarField> fields;
  fields.reserve(out.size());
  for (auto& a : out) fields.emplace_back(grid, std::move(a));
  return FrameTensor(k + 1, std::move(fields));
}

/// The same derivative computed directly in the frame: directional
/// derivatives e_w(T_i) by collocation (d_theta, d_phi) plus the cot(theta)
/// connection terms. Kept as an independent route for cross-checks; its
/// roundoff grows faster with L than covariant_derivative's.
inline FrameTensor covariant_derivative_collocation(const FrameTensor& t)
{
  const int k = t.rank();
  if (k >= kMaxRank) throw std::invalid_argument("covariant_derivative: rank " + std::to_string(k) + " input overflows");
  const auto& grid = t.grid();
  const auto& s = grid->sin_theta().array();
  const auto& cot = grid->cot_theta().array();
  const std::size_t n = t.size();

  std::vector<ScalarField> out(2 * n, ScalarField(grid));
  for (std::size_t flat = 0; flat < n; ++flat) {
    out[flat] = d_theta(t[flat], k);

    Array e1 = d_phi(t[flat]).values().colwise() / s;
    for (int slot = 0; slot < k; ++slot) {
      const auto& partner = t[detail::flip(flat, k, slot)].values();
      if (detail::bit(flat, k, slot) == 0)
        e1 -= partner.colwise() * cot;  // T(.., nabla_{e1} e0 = cot e1, ..)
      else
        e1 += partner.colwise() * cot;  // T(.., nabla_{e1} e1 = -cot e0, ..)
    }
    out[n + flat] = ScalarField(grid, std::move(e1));
  }
  return FrameTensor(k + 1, std::move(out));
}

/// S(a)(X, Y, Z) = (a(X, Y, Z) + a(Y, Z, X) + a(Z, X, Y)) / 3.
inline FrameTensor symmetrize3(const FrameTensor& a)
{
  if (a.rank() != 3) throw std::invalid_argument("symmetrize3: rank-3 tensor required");
  std::vector<ScalarField> out;
  out.reserve(8);
  for (std::size_t flat = 0; flat < 8; ++flat) {
    const int x = detail::bit(flat, 3, 0), y = detail::bit(flat, 3, 1), z = detail::bit(flat, 3, 2);
    auto sum = a[flat] + a[detail::compose<3>({y, z, x})] + a[detail::compose<3>({z, x, y})];
    out.push_back(sum * (1.0 / 3.0));
  }
  return FrameTensor(3, std::move(out));
}

/// Metric used to raise an index in a trace or norm: the round metric, or the
/// evolving metric g = (1/v) g_{S^2}, whose inverse is v g_{S^2}^{-1}.
struct RoundMetric
{
};
struct EvolvingMetric
{
  const ScalarField* v;
};
using Metric = std::variant<RoundMetric, EvolvingMetric>;

inline Metric evolving(const ScalarField& v) { return EvolvingMetric{&v}; }

/// Contraction of slots p and q. The evolving trace is v times the round trace.
inline FrameTensor trace_pair(const FrameTensor& t, int p, int q, Metric metric = RoundMetric{})
{
  const int k = t.rank();
  if (k < 2) throw std::invalid_argument("trace_pair: rank >= 2 required");
  if (p == q || p < 0 || q < 0 || p >= k || q >= k)
    throw std::invalid_argument("trace_pair: invalid slot pair (" + std::to_string(p) + ", " + std::to_string(q) + ")");
  if (p > q) std::swap(p, q);
  const std::size_t n_out = std::size_t{1} << (k - 2);
  std::vector<ScalarField> out(n_out, ScalarField(t.grid()));
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    if (detail::bit(flat, k, p) != detail::bit(flat, k, q)) continue;
    const std::size_t reduced = detail::drop_slot(detail::drop_slot(flat, k, q), k - 1, p);
    out[reduced] += t[flat];
  }
  if (const auto* ev = std::get_if<EvolvingMetric>(&metric))
    for (auto& c : out) c = *ev->v * c;
  return FrameTensor(k - 2, std::move(out));
}

/// Largest difference between t and t with slots (p, q) swapped.
inline double transpose_defect(const FrameTensor& t, int p, int q)
{
  double worst = 0.0;
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    if (detail::bit(flat, t.rank(), p) == detail::bit(flat, t.rank(), q)) continue;
    const std::size_t swapped = detail::flip(detail::flip(flat, t.rank(), p), t.rank(), q);
    worst = std::max(worst, (t[flat].values() - t[swapped].values()).abs().maxCoeff());
  }
  return worst;
}

/// Largest round trace over every slot pair.
inline double max_trace(const FrameTensor& t)
{
  double worst = 0.0;
  for (int p = 0; p < t.rank(); ++p)
    for (int q = p + 1; q < t.rank(); ++q) worst = std::max(worst, trace_pair(t, p, q).sup_norm());
  return worst;
}

/// Largest permutation defect among the given slots (adjacent transpositions
/// generate the full symmetric group).
inline double symmetry_defect(const FrameTensor& t, int first_slot = 0)
{
  double worst = 0.0;
  for (int p = first_slot; p + 1 < t.rank(); ++p) worst = std::max(worst, transpose_defect(t, p, p + 1));
  return worst;
}

inline constexpr double kPreconditionTol = 1e-6;

struct TraceFree3
{
  FrameTensor tfb;
  FrameTensor z;
};

/// Trace-free part of a totally symmetric 3-tensor b:
///   z = tr^{1,2} b / 4,
///   TF(b)(X,Y,Z) = b(X,Y,Z) - z(X)<Y,Z> - z(Y)<Z,X> - z(Z)<X,Y>.
inline TraceFree3 tf3(const FrameTensor& b)
{
  if (b.rank() != 3) throw std::invalid_argument("tf3: rank-3 tensor required");
  const double scale = b.sup_norm();
  if (symmetry_defect(b) > kPreconditionTol * scale)
    throw std::domain_error("tf3: input is not totally symmetric");
  auto z = trace_pair(b, 1, 2) * 0.25;
  if (detail::z_bug_flag().load()) z *= 4.0 / 3.0;

  std::vector<ScalarField> out;
  out.reserve(8);
  for (std::size_t flat = 0; flat < 8; ++flat) {
    const int x = detail::bit(flat, 3, 0), y = detail::bit(flat, 3, 1), w = detail::bit(flat, 3, 2);
    ScalarField c = b[flat];
    if (y == w) c -= z[x];
    if (w == x) c -= z[y];
    if (x == y) c -= z[w];
    out.push_back(std::move(c));
  }
  return {FrameTensor(3, std::move(out)), std::move(z)};
}

/// TF(a) = a - (tr a / 2) g for a symmetric 2-tensor.
inline FrameTensor tf2(const FrameTensor& a)
{
  if (a.rank() != 2) throw std::invalid_argument("tf2: rank-2 tensor required");
  if (transpose_defect(a, 0, 1) > kPreconditionTol * a.sup_norm())
    throw std::domain_error("tf2: input is not symmetric");
  const auto half_trace = (a[0] + a[3]) * 0.5;
  return FrameTensor(2, {a[0] - half_trace, a[1], a[2], a[3] - half_trace});
}

struct Decomposition4
{
  FrameTensor chat;
  FrameTensor e;
  FrameTensor f;
};

/// Metric terms of the 4-tensor decomposition:
///   <W,X> e(Y,Z) + <W,Y> e(Z,X) + <W,Z> e(X,Y)
/// + <Y,Z> f(X,W) + <Z,X> f(Y,W) + <X,Y> f(Z,W).
inline FrameTensor decompose4_metric_terms(const FrameTensor& e, const FrameTensor& f)
{
  auto out = FrameTensor::zero(e.grid(), 4);
  for (std::size_t flat = 0; flat < 16; ++flat) {
    const int w = detail::bit(flat, 4, 0), x = detail::bit(flat, 4, 1);
    const int y = detail::bit(flat, 4, 2), z = detail::bit(flat, 4, 3);
    auto& c = out[flat];
    if (w == x) c += e[detail::compose<2>({y, z})];
    if (w == y) c += e[detail::compose<2>({z, x})];
    if (w == z) c += e[detail::compose<2>({x, y})];
    if (y == z) c += f[detail::compose<2>({x, w})];
    if (z == x) c += f[detail::compose<2>({y, w})];
    if (x == y) c += f[detail::compose<2>({z, w})];
  }
  return out;
}

namespace detail {

/// decompose4 without the precondition checks, for tensors built internally
/// whose defects are truncation error on under-resolved data.
inline Decomposition4 decompose4_unchecked(const FrameTensor& c)
{
  auto e = trace_pair(c, 0, 1) * (1.0 / 3.0);
  auto f = e * -0.5;
  auto chat = c - decompose4_metric_terms(e, f);
  return {std::move(chat), std::move(e), std::move(f)};
}

}  // namespace detail

/// Split a 4-tensor that is symmetric and trace-free in its last three slots
/// into a totally trace-free part and metric terms built from
/// e = tr^{0,1} c / 3 and f = -e / 2.
inline Decomposition4 decompose4(const FrameTensor& c)
{
  if (c.rank() != 4) throw std::invalid_argument("decompose4: rank-4 tensor required");
  const double tol = kPreconditionTol * c.sup_norm();
  if (symmetry_defect(c, 1) > tol) throw std::domain_error("decompose4: not symmetric in the last three slots");
  for (auto [p, q] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}})
    if (trace_pair(c, p, q).sup_norm() > tol) throw std::domain_error("decompose4: not trace-free in the last three slots");

  return detail::decompose4_unchecked(c);
}

inline FrameTensor reconstruct4(const Decomposition4& d) { return d.chat + decompose4_metric_terms(d.e, d.f); }

/// (S x T)(X.., Y..) = S(X..) T(Y..).
inline FrameTensor tensor_product(const FrameTensor& s, const FrameTensor& t)
{
  if (s.grid() != t.grid()) throw std::invalid_argument("tensor_product: grid mismatch");
  const int k = s.rank() + t.rank();
  if (k > kMaxRank) throw std::invalid_argument("tensor_product: result rank exceeds 4");
  std::vector<ScalarField> out;
  out.reserve(std::size_t{1} << k);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) out.push_back(s[i] * t[j]);
  return FrameTensor(k, std::move(out));
}

/// Full contraction. For the evolving metric a rank-k inner product picks up v^k.
inline ScalarField inner(const FrameTensor& s, const FrameTensor& t, Metric metric = RoundMetric{})
{
  s.check_rank(t);
  ScalarField acc(s.grid());
  for (std::size_t k = 0; k < s.size(); ++k) acc += s[k] * t[k];
  if (const auto* ev = std::get_if<EvolvingMetric>(&metric))
    for (int r = 0; r < s.rank(); ++r) acc = *ev->v * acc;
  return acc;
}

inline ScalarField norm_sq(const FrameTensor& t, Metric metric = RoundMetric{}) { return inner(t, t, metric); }

/// Ricci-identity sentinel for a 1-form w on the unit sphere:
///   (nabla^2 w)(a,b,c) - (nabla^2 w)(b,a,c) + g_bc w_a - g_ac w_b,
/// which vanishes identically for exact derivatives.
inline FrameTensor commutator_defect(const FrameTensor& w)
{
  if (w.rank() != 1) throw std::invalid_argument("commutator_defect: 1-form required");
  const auto dd = covariant_derivative(covariant_derivative(w));
  auto out = FrameTensor::zero(w.grid(), 3);
  for (std::size_t flat = 0; flat < 8; ++flat) {
    const int a = detail::bit(flat, 3, 0), b = detail::bit(flat, 3, 1), c = detail::bit(flat, 3, 2);
    auto val = dd[flat] - dd[detail::compose<3>({b, a, c})];
    if (b == c) val += w[a];
    if (a == c) val -= w[b];
    out[flat] = std::move(val);
  }
  return out;
}

/// nabla^k v as a rank-k tensor.
inline FrameTensor iterated_derivative(const ScalarField& v, int k)
{
  auto t = FrameTensor::scalar(v);
  for (int i = 0; i < k; ++i) t = covariant_derivative(t);
  return t;
}

}  // namespace sphflow
