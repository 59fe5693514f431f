#pragma once

// Critical rank-one tensors λ v^d of a binary form. The eigenvectors v are the
// zeros of D(f) on ℙ¹, scaled to v·v = 1 in the bilinear pairing; the form is
// rotation invariant (D(f) = 0) exactly when f = c (x² + y²)^{d/2}, in which
// case every unit vector is an eigenvector with eigenvalue c.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "bform/form.hpp"
#include "bform/roots.hpp"

namespace bform {

struct CriticalRank1 {
  /// Eigenvector, normalized so that a² + b² = 1 (bilinear). For a real
  /// direction this is the Euclidean unit vector.
  ComplexLinear v;
  cplx lambda;
  int multiplicity = 1;
  bool is_real = false;
  /// a² + b² = 0, so v cannot be normalized; v is Hermitian-unit instead.
  bool isotropic = false;

  ComplexForm tensor(int d) const { return lambda * power(v, d); }
};

/// f = c·(x² + y²)^{d/2}: the critical rank-one tensors form the circle
/// {c·v^d : ‖v‖ = 1}.
struct DegenerateCircle {
  int degree = 0;
  cplx eigenvalue;
};

using EigenResult = std::variant<std::vector<CriticalRank1>, DegenerateCircle>;

namespace detail {

template <Scalar T>
void require_nonzero(const BinaryForm<T>& f) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroForm, "the zero form has no critical tensors");
}

/// D(f) = 0 up to rounding, relative to ‖f‖.
inline bool is_rotation_invariant(const ComplexForm& f, const ComplexForm& df) {
  return df.norm() <= tol::kZeroD * std::max(1, f.degree()) * f.norm();
}

/// Chooses between v and -v: larger Re a, ties broken by larger Re b.
inline ComplexLinear canonical_sign(ComplexLinear v) {
  constexpr double tie = 1e-14;
  const bool flip = v.a.real() < -tie || (std::abs(v.a.real()) <= tie && v.b.real() < 0.0);
  return flip ? -v : v;
}

inline double direction_angle(const ComplexLinear& v) {
  double theta = std::atan2(v.b.real(), v.a.real());
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  return theta;
}

}  // namespace detail

/// Projection coefficient c of f onto (x² + y²)^{d/2} (d even).
inline cplx circle_coefficient(const ComplexForm& f) {
  const auto q = circle_power(f.degree()).complexified();
  return bombieri_dot(f, q) / q.norm2();
}

/// Eigenvectors with eigenvalues λ = ⟨f, v^d⟩ and root multiplicities
/// (summing to d), or the degenerate circle marker. Sorted by decreasing |λ|;
/// ties put real eigenvectors first, then order by angle in [0, π).
template <Scalar T>
EigenResult eigen_pairs(const BinaryForm<T>& form) {
  detail::require_nonzero(form);
  if (form.degree() < 1) throw Error(ErrorCode::InvalidArgument, "eigenvectors need degree >= 1");
  const ComplexForm f = form.complexified();
  const ComplexForm df = apply_D(f);
  if (detail::is_rotation_invariant(f, df)) return DegenerateCircle{f.degree(), circle_coefficient(f)};

  const bool real_input = imaginary_ratio(f) <= tol::kReal;
  std::vector<CriticalRank1> out;
  for (const auto& root : roots(df).roots) {
    CriticalRank1 e;
    e.multiplicity = root.multiplicity;
    ComplexLinear r = root.direction;
    if (root.is_real()) {
      const double n = std::hypot(r.a.real(), r.b.real());
      e.v = {cplx(r.a.real() / n), cplx(r.b.real() / n)};
    } else {
      const cplx q = r.a * r.a + r.b * r.b;
      if (std::abs(q) <= 1e-12) {
        e.isotropic = true;
        e.v = r;
      } else {
        e.v = (1.0 / std::sqrt(q)) * r;
      }
    }
    e.v = detail::canonical_sign(e.v);
    e.lambda = f(e.v);
    const double scale = std::max(f.norm(), 1e-300);
    e.is_real = root.is_real() && real_input && std::abs(e.lambda.imag()) <= tol::kReal * scale;
    if (e.is_real) e.lambda = e.lambda.real();
    out.push_back(e);
  }

  std::sort(out.begin(), out.end(), [](const CriticalRank1& p, const CriticalRank1& q) {
    const double lp = std::abs(p.lambda), lq = std::abs(q.lambda);
    if (std::abs(lp - lq) > 1e-9 * std::max({1.0, lp, lq})) return lp > lq;
    if (p.is_real != q.is_real) return p.is_real;
    const double tp = detail::direction_angle(p.v), tq = detail::direction_angle(q.v);
    if (std::abs(tp - tq) > 1e-12) return tp < tq;
    return p.v.a.imag() + p.v.b.imag() < q.v.a.imag() + q.v.b.imag();
  });
  return out;
}

inline bool is_circle(const EigenResult& r) { return std::holds_alternative<DegenerateCircle>(r); }

/// The critical rank-one tensors λ v^d themselves, paired with λ.
template <Scalar T>
std::variant<std::vector<std::pair<cplx, ComplexForm>>, DegenerateCircle> critical_rank_one(const BinaryForm<T>& f) {
  auto result = eigen_pairs(f);
  if (auto* circle = std::get_if<DegenerateCircle>(&result)) return *circle;
  std::vector<std::pair<cplx, ComplexForm>> tensors;
  for (const auto& e : std::get<std::vector<CriticalRank1>>(result)) tensors.emplace_back(e.lambda, e.tensor(f.degree()));
  return tensors;
}

/// The singular space H_f = D(f)^⊥.
struct Hyperplane {
  ComplexForm normal;
  /// D(f) = 0: H_f is the whole space.
  bool degenerate = false;

  /// |⟨g, D(f)⟩| / (‖g‖ ‖D(f)‖) with the bilinear pairing; 0 means g ∈ H_f.
  double membership(const ComplexForm& g) const {
    if (degenerate) return 0.0;
    const double ng = g.norm();
    if (ng == 0.0) return 0.0;
    return std::abs(bilinear_dot(g, normal)) / (ng * normal.norm());
  }
  template <Scalar T>
  double membership(const BinaryForm<T>& g) const
    requires(!is_complex_v<T>)
  {
    return membership(g.complexified());
  }
};

template <Scalar T>
Hyperplane singular_space(const BinaryForm<T>& form) {
  detail::require_nonzero(form);
  const ComplexForm f = form.complexified();
  Hyperplane h{apply_D(f), false};
  h.degenerate = detail::is_rotation_invariant(f, h.normal);
  return h;
}

}  // namespace bform
