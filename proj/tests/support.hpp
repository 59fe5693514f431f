#pragma once

// Shared generators and independent oracles for the test suites. The oracles
// work on plain exponent-indexed coefficient vectors and never call into the
// library.

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "bform/bform.hpp"

namespace bform::testing {

using Poly = std::vector<cplx>;  // p[i] multiplies x^i y^(deg - i)

/// Hand-rolled generator: a seeded engine plus the draws the properties need.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx complex_normal() { return {normal(), normal()}; }

  RealForm real_form(int d) {
    std::vector<double> c(d + 1);
    for (auto& x : c) x = normal();
    return RealForm(std::move(c));
  }
  ComplexForm complex_form(int d) {
    std::vector<cplx> c(d + 1);
    for (auto& x : c) x = complex_normal();
    return ComplexForm(std::move(c));
  }
  RealLinear real_linear() { return {normal(), normal()}; }
  RealLinear unit_linear() {
    const double t = uniform(0.0, std::numbers::pi);
    return {std::cos(t), std::sin(t)};
  }
  ComplexLinear complex_linear() { return {complex_normal(), complex_normal()}; }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double factorial(int n) { return std::tgamma(n + 1.0); }

template <Scalar T>
Poly to_poly(const BinaryForm<T>& f) {
  Poly p;
  for (const auto& c : f.coeffs()) p.push_back(c);
  return p;
}

inline Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Π (a_i x + b_i y) by repeated polynomial multiplication.
inline Poly expand(const std::vector<std::pair<cplx, cplx>>& factors) {
  Poly p{1.0};
  for (const auto& [a, b] : factors) p = multiply(p, Poly{b, a});
  return p;
}

/// ⟨f, g⟩ = (1/d!) f(∂x, ∂y) ḡ: the differential-operator form of the
/// Bombieri product.
inline cplx apolar_dot(const Poly& f, const Poly& g, bool conjugate = true) {
  const int d = static_cast<int>(f.size()) - 1;
  cplx s = 0.0;
  for (int i = 0; i <= d; ++i)
    s += f[i] * (conjugate ? std::conj(g[i]) : g[i]) * factorial(i) * factorial(d - i);
  return s / factorial(d);
}

/// y ∂f/∂x − x ∂f/∂y, term by term.
inline Poly rotation_derivative(const Poly& f) {
  const int d = static_cast<int>(f.size()) - 1;
  Poly out(d + 1, 0.0);
  for (int i = 0; i <= d; ++i) {
    // x^i y^(d-i)
    if (i > 0) out[i - 1] += double(i) * f[i];            // y · i x^(i-1) y^(d-i)
    if (d - i > 0) out[i + 1] -= double(d - i) * f[i];    // x · (d-i) x^i y^(d-i-1)
  }
  return out;
}

inline double poly_norm_inf(const Poly& p) {
  double m = 0.0;
  for (const auto& c : p) m = std::max(m, std::abs(c));
  return m;
}

inline double max_diff(const Poly& a, const Poly& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const cplx x = i < a.size() ? a[i] : 0.0, y = i < b.size() ? b[i] : 0.0;
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

/// Smallest projective distance from `v` to any root in `set`.
inline double nearest(const ComplexLinear& v, const ProjectiveRootSet& set) {
  double best = 1e300;
  for (const auto& r : set.roots) best = std::min(best, projective_distance(v, r.direction));
  return best;
}

}  // namespace bform::testing
