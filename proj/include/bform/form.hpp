#pragma once

// Binary forms f = Σ c_i x^i y^{d-i} stored in the monomial basis, together
// with the SO(2)-invariant (Bombieri) scalar product and the rotation
// operator D(f) = y f_x - x f_y.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "bform/errors.hpp"
#include "bform/scalar.hpp"

namespace bform {

/// Binomial coefficient as a double; exact for n ≤ 56.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

/// Which extension of the scalar product to use over ℂ. Over ℝ both agree.
enum class Pairing { Hermitian, Bilinear };

template <Scalar T>
struct LinearForm {
  T a{};
  T b{};

  double norm2() const { return abs2(a) + abs2(b); }
  double norm() const { return std::sqrt(norm2()); }
  bool is_unit() const { return std::abs(norm() - 1.0) <= tol::kUnit; }

  LinearForm operator-() const { return {-a, -b}; }
  friend LinearForm operator*(const T& s, const LinearForm& l) { return {s * l.a, s * l.b}; }
  friend LinearForm operator+(const LinearForm& l, const LinearForm& m) { return {l.a + m.a, l.b + m.b}; }
  friend LinearForm operator-(const LinearForm& l, const LinearForm& m) { return {l.a - m.a, l.b - m.b}; }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

using RealLinear = LinearForm<double>;
using ComplexLinear = LinearForm<cplx>;

/// l^⊥ = D(l) = -b x + a y.
template <Scalar T>
LinearForm<T> perp(const LinearForm<T>& l) {
  return {-l.b, l.a};
}

template <Scalar T>
T dot(const LinearForm<T>& l, const LinearForm<T>& m, Pairing pairing = Pairing::Hermitian) {
  if (pairing == Pairing::Hermitian) return l.a * conj_if(m.a) + l.b * conj_if(m.b);
  return l.a * m.a + l.b * m.b;
}

template <Scalar T>
class BinaryForm {
 public:
  using value_type = T;

  BinaryForm() : coeffs_(1, T{}) {}
  explicit BinaryForm(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "a form needs at least one coefficient");
  }
  BinaryForm(std::initializer_list<T> coeffs) : BinaryForm(std::vector<T>(coeffs)) {}

  static BinaryForm zero(int degree) { return BinaryForm(std::vector<T>(degree + 1, T{})); }
  static BinaryForm monomial(int degree, int x_power, T coeff = T{1}) {
    auto f = zero(degree);
    f.coeffs_.at(x_power) = coeff;
    return f;
  }
  /// Inverse of bombieri_coords(): c_i = C(d,i)·a_i.
  static BinaryForm from_bombieri(std::span<const T> a) {
    const int d = static_cast<int>(a.size()) - 1;
    std::vector<T> c(a.size());
    for (int i = 0; i <= d; ++i) c[i] = a[i] * binomial(d, i);
    return BinaryForm(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const T> coeffs() const { return coeffs_; }
  const T& operator[](int i) const { return coeffs_[i]; }
  T& operator[](int i) { return coeffs_[i]; }
  static constexpr Field field() { return field_of<T>(); }

  /// a_i = c_i / C(d,i).
  std::vector<T> bombieri_coords() const {
    std::vector<T> a(coeffs_.size());
    for (int i = 0; i <= degree(); ++i) a[i] = coeffs_[i] / binomial(degree(), i);
    return a;
  }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i <= degree(); ++i) s += abs2(coeffs_[i]) / binomial(degree(), i);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }
  bool is_zero(double threshold = tol::kZeroCoeff) const { return max_abs_coeff() <= threshold; }

  /// f(a, b) = Σ c_i a^i b^{d-i}.
  template <Scalar U>
  auto operator()(const U& a, const U& b) const {
    using R = std::conditional_t<is_complex_v<T> || is_complex_v<U>, cplx, double>;
    const int d = degree();
    std::vector<R> pb(d + 1);
    pb[0] = R{1};
    for (int i = 1; i <= d; ++i) pb[i] = pb[i - 1] * R(b);
    R acc{0};
    R pa{1};
    for (int i = 0; i <= d; ++i) {
      acc += R(coeffs_[i]) * pa * pb[d - i];
      pa *= R(a);
    }
    return acc;
  }
  template <Scalar U>
  auto operator()(const LinearForm<U>& l) const {
    return (*this)(l.a, l.b);
  }

  BinaryForm dx() const {
    const int d = degree();
    if (d == 0) return zero(0);
    std::vector<T> c(d);
    for (int j = 0; j < d; ++j) c[j] = static_cast<double>(j + 1) * coeffs_[j + 1];
    return BinaryForm(std::move(c));
  }
  BinaryForm dy() const {
    const int d = degree();
    if (d == 0) return zero(0);
    std::vector<T> c(d);
    for (int j = 0; j < d; ++j) c[j] = static_cast<double>(d - j) * coeffs_[j];
    return BinaryForm(std::move(c));
  }

  BinaryForm<cplx> complexified() const {
    std::vector<cplx> c(coeffs_.begin(), coeffs_.end());
    return BinaryForm<cplx>(std::move(c));
  }
  BinaryForm conj() const {
    auto g = *this;
    for (auto& c : g.coeffs_) c = conj_if(c);
    return g;
  }

  BinaryForm operator-() const {
    auto g = *this;
    for (auto& c : g.coeffs_) c = -c;
    return g;
  }
  BinaryForm& operator+=(const BinaryForm& g) {
    require_same_degree(g);
    for (int i = 0; i <= degree(); ++i) coeffs_[i] += g.coeffs_[i];
    return *this;
  }
  BinaryForm& operator-=(const BinaryForm& g) {
    require_same_degree(g);
    for (int i = 0; i <= degree(); ++i) coeffs_[i] -= g.coeffs_[i];
    return *this;
  }
  BinaryForm& operator*=(const T& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend BinaryForm operator+(BinaryForm f, const BinaryForm& g) { return f += g; }
  friend BinaryForm operator-(BinaryForm f, const BinaryForm& g) { return f -= g; }
  friend BinaryForm operator*(const T& s, BinaryForm f) { return f *= s; }
  friend BinaryForm operator*(BinaryForm f, const T& s) { return f *= s; }

  friend BinaryForm operator*(const BinaryForm& f, const BinaryForm& g) {
    std::vector<T> c(f.coeffs_.size() + g.coeffs_.size() - 1, T{});
    for (std::size_t i = 0; i < f.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < g.coeffs_.size(); ++j) c[i + j] += f.coeffs_[i] * g.coeffs_[j];
    return BinaryForm(std::move(c));
  }
  friend bool operator==(const BinaryForm&, const BinaryForm&) = default;

  void require_same_degree(const BinaryForm& g) const {
    if (g.degree() != degree()) throw Error(ErrorCode::DegreeMismatch, "forms of different degree");
  }

 private:
  std::vector<T> coeffs_;
};

using RealForm = BinaryForm<double>;
using ComplexForm = BinaryForm<cplx>;

/// The linear form ax + by as a degree-1 binary form.
template <Scalar T>
BinaryForm<T> as_form(const LinearForm<T>& l) {
  return BinaryForm<T>({l.b, l.a});
}

/// Σ C(d,i) a_i b̄_i (Hermitian) or Σ C(d,i) a_i b_i (bilinear) in Bombieri
/// coordinates.
template <Scalar T>
T bombieri_dot(const BinaryForm<T>& f, const BinaryForm<T>& g, Pairing pairing = Pairing::Hermitian) {
  f.require_same_degree(g);
  const int d = f.degree();
  T s{};
  for (int i = 0; i <= d; ++i) {
    const T gi = pairing == Pairing::Hermitian ? conj_if(g[i]) : g[i];
    s += f[i] * gi / binomial(d, i);
  }
  return s;
}

template <Scalar T>
T bilinear_dot(const BinaryForm<T>& f, const BinaryForm<T>& g) {
  return bombieri_dot(f, g, Pairing::Bilinear);
}

/// Scalar product of the split forms l_1⋯l_d and m_1⋯m_d as the normalized
/// permanent (1/d!) Σ_σ Π_i ⟨l_i, m_σ(i)⟩, evaluated with Ryser's formula.
template <Scalar T>
T split_dot(std::span<const LinearForm<T>> ls, std::span<const LinearForm<T>> ms,
            Pairing pairing = Pairing::Hermitian) {
  if (ls.size() != ms.size() || ls.empty())
    throw Error(ErrorCode::LengthMismatch, "split_dot needs two non-empty lists of equal length");
  const std::size_t n = ls.size();
  if (n > 30) throw Error(ErrorCode::InvalidArgument, "split_dot supports at most 30 factors");
  std::vector<T> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = dot(ls[i], ms[j], pairing);

  T perm{};
  std::vector<T> row_sums(n);
  for (std::size_t subset = 1; subset < (std::size_t{1} << n); ++subset) {
    std::fill(row_sums.begin(), row_sums.end(), T{});
    int bits = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(subset >> j & 1u)) continue;
      ++bits;
      for (std::size_t i = 0; i < n; ++i) row_sums[i] += m[i * n + j];
    }
    T prod{1};
    for (const auto& r : row_sums) prod *= r;
    perm += ((static_cast<int>(n) - bits) % 2 == 0) ? prod : -prod;
  }
  double factorial = 1.0;
  for (std::size_t i = 2; i <= n; ++i) factorial *= static_cast<double>(i);
  return perm / factorial;
}

/// D(f) = y f_x - x f_y; degree-preserving, skew-adjoint for the real
/// scalar product.
template <Scalar T>
BinaryForm<T> apply_D(const BinaryForm<T>& f) {
  const int d = f.degree();
  auto out = BinaryForm<T>::zero(d);
  for (int j = 0; j <= d; ++j) {
    T v{};
    if (j + 1 <= d) v += static_cast<double>(j + 1) * f[j + 1];
    if (j - 1 >= 0) v -= static_cast<double>(d - j + 1) * f[j - 1];
    out[j] = v;
  }
  return out;
}

/// l^d with coefficients C(d,i) a^i b^{d-i}.
template <Scalar T>
BinaryForm<T> power(const LinearForm<T>& l, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative power");
  std::vector<T> pa(d + 1), pb(d + 1);
  pa[0] = pb[0] = T{1};
  for (int i = 1; i <= d; ++i) {
    pa[i] = pa[i - 1] * l.a;
    pb[i] = pb[i - 1] * l.b;
  }
  std::vector<T> c(d + 1);
  for (int i = 0; i <= d; ++i) c[i] = binomial(d, i) * pa[i] * pb[d - i];
  return BinaryForm<T>(std::move(c));
}

/// The vector w* with ⟨w*, w⟩ = ⟨f, v^{d-1} w⟩ for every w (bilinear
/// pairing), i.e. ∇f(v)/d.
template <Scalar T>
LinearForm<T> contract(const BinaryForm<T>& f, const LinearForm<T>& v) {
  const int d = f.degree();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "contract needs degree >= 1");
  const T fx = f.dx()(v.a, v.b);
  const T fy = f.dy()(v.a, v.b);
  return {fx / static_cast<double>(d), fy / static_cast<double>(d)};
}

/// f(L1, L2): substitute x ↦ L1, y ↦ L2.
template <Scalar T>
BinaryForm<T> substitute(const BinaryForm<T>& f, const LinearForm<T>& x_image, const LinearForm<T>& y_image) {
  const int d = f.degree();
  std::vector<BinaryForm<T>> px(d + 1), py(d + 1);
  px[0] = py[0] = BinaryForm<T>({T{1}});
  const auto lx = as_form(x_image);
  const auto ly = as_form(y_image);
  for (int i = 1; i <= d; ++i) {
    px[i] = px[i - 1] * lx;
    py[i] = py[i - 1] * ly;
  }
  auto out = BinaryForm<T>::zero(d);
  for (int i = 0; i <= d; ++i) {
    if (f[i] == T{}) continue;
    out += f[i] * (px[i] * py[d - i]);
  }
  return out;
}

/// f ∘ R_φ where R_φ(x, y) = (cos φ x - sin φ y, sin φ x + cos φ y). Isometric
/// for the Bombieri product.
template <Scalar T>
BinaryForm<T> rotate(const BinaryForm<T>& f, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return substitute(f, LinearForm<T>{T{c}, T{-s}}, LinearForm<T>{T{s}, T{c}});
}

/// The same substitution applied to a linear form; rotate(l^d) = rotate(l)^d.
template <Scalar T>
LinearForm<T> rotate(const LinearForm<T>& l, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {l.a * c + l.b * s, -l.a * s + l.b * c};
}

/// (x² + y²)^{d/2} for even d.
inline RealForm circle_power(int d) {
  if (d < 0 || d % 2 != 0) throw Error(ErrorCode::OddDegree, "circle power needs an even degree");
  auto f = RealForm::zero(d);
  for (int j = 0; j <= d / 2; ++j) f[2 * j] = binomial(d / 2, j);
  return f;
}

/// ‖f - g‖ in the Bombieri norm.
template <Scalar T>
double distance(const BinaryForm<T>& f, const BinaryForm<T>& g) {
  return (f - g).norm();
}

/// Largest |Im c_i| relative to the form size.
inline double imaginary_ratio(const ComplexForm& f) {
  double im = 0.0;
  for (const auto& c : f.coeffs()) im = std::max(im, std::abs(c.imag()));
  const double scale = f.max_abs_coeff();
  return scale > 0.0 ? im / scale : 0.0;
}

inline RealForm real_part(const ComplexForm& f) {
  std::vector<double> c;
  c.reserve(f.coeffs().size());
  for (const auto& v : f.coeffs()) c.push_back(v.real());
  return RealForm(std::move(c));
}

}  // namespace bform
