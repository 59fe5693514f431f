#pragma once

// Projective roots of binary forms over ℂ with multiplicities.
//
// The form is first rotated so that the point at infinity of the affine chart
// sits far from every root, then the dehomogenized polynomial is solved with
// Aberth–Ehrlich iteration (companion-matrix eigenvalues as fallback), and
// clusters produced by multiple roots are merged.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "bform/form.hpp"

namespace bform {

struct ProjectiveRoot {
  /// A point (a, b) ∈ ℂ² with f(a, b) = 0, unit Hermitian norm, phase fixed
  /// so that the larger component is real and positive.
  ComplexLinear direction;
  int multiplicity = 1;

  bool is_real(double tolerance = tol::kReal) const {
    return std::abs(direction.a.imag()) <= tolerance && std::abs(direction.b.imag()) <= tolerance;
  }
};

struct ProjectiveRootSet {
  std::vector<ProjectiveRoot> roots;
  /// Set for the identically zero form, whose zero set is all of ℙ¹.
  bool degenerate = false;

  int total_multiplicity() const {
    return std::accumulate(roots.begin(), roots.end(), 0,
                           [](int s, const ProjectiveRoot& r) { return s + r.multiplicity; });
  }
  bool all_simple() const {
    return std::all_of(roots.begin(), roots.end(), [](const ProjectiveRoot& r) { return r.multiplicity == 1; });
  }
  int count_real() const {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(), [](const ProjectiveRoot& r) { return r.is_real(); }));
  }
};

/// Chordal (Fubini–Study) distance between projective points; 0 when equal,
/// 1 when orthogonal.
template <Scalar T>
double projective_distance(const LinearForm<T>& p, const LinearForm<T>& q) {
  const double np = p.norm(), nq = q.norm();
  if (np == 0.0 || nq == 0.0) return 1.0;
  const double cross = std::abs(p.a * q.b - p.b * q.a);
  return cross / (np * nq);
}

/// Unit Hermitian norm with the larger component real and positive.
inline ComplexLinear canonical_direction(ComplexLinear p) {
  const double n = p.norm();
  if (n == 0.0) return p;
  p = cplx(1.0 / n) * p;
  const cplx pivot = std::abs(p.a) >= std::abs(p.b) * (1.0 - 1e-12) ? p.a : p.b;
  const cplx phase = std::conj(pivot) / std::abs(pivot);
  p = phase * p;
  auto clean = [](cplx v) {
    double re = std::abs(v.real()) < 1e-17 ? 0.0 : v.real();
    double im = std::abs(v.imag()) < 1e-17 ? 0.0 : v.imag();
    return cplx(re, im);
  };
  return {clean(p.a), clean(p.b)};
}

namespace detail {

inline cplx horner(std::span<const cplx> c, cplx z) {
  cplx acc{0.0};
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

inline cplx horner_derivative(std::span<const cplx> c, cplx z) {
  cplx acc{0.0};
  for (std::size_t i = c.size(); i-- > 1;) acc = acc * z + static_cast<double>(i) * c[i];
  return acc;
}

inline double abs_horner(std::span<const cplx> c, double r) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * r + std::abs(c[i]);
  return acc;
}

/// Taylor coefficient p^{(m)}(z)/m! of p(t) = Σ c_i t^i.
inline cplx taylor_coefficient(std::span<const cplx> c, cplx z, int m) {
  cplx acc{0.0};
  for (int i = static_cast<int>(c.size()) - 1; i >= m; --i) acc = acc * z + binomial(i, m) * c[i];
  return acc;
}

/// Roots of the monic-normalizable polynomial Σ c_i t^i (c_n ≠ 0) via its
/// companion matrix.
inline std::vector<cplx> companion_roots(std::span<const cplx> c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::vector<cplx> out(n);
  for (int i = 0; i < n; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

/// Aberth–Ehrlich simultaneous iteration. Returns false if the iteration has
/// not met the backward-error stopping rule within max_iters sweeps.
inline bool aberth_roots(std::span<const cplx> c, std::vector<cplx>& z, int max_iters = 200) {
  const int n = static_cast<int>(c.size()) - 1;
  z.assign(n, cplx{});
  if (n == 0) return true;
  const double lead = std::abs(c[n]);
  double radius = 0.0;
  {
    // Geometric mean of the root moduli, from the nonzero extreme coefficients.
    int low = 0;
    while (low < n && std::abs(c[low]) == 0.0) ++low;
    radius = low < n ? std::pow(std::abs(c[low]) / lead, 1.0 / (n - low)) : 0.0;
    if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
  }
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<bool> done(n, false);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool all_done = true;
    for (int k = 0; k < n; ++k) {
      if (done[k]) continue;
      const cplx p = horner(c, z[k]);
      const double backward = abs_horner(c, std::abs(z[k]));
      if (std::abs(p) <= 8.0 * eps * backward) {
        done[k] = true;
        continue;
      }
      all_done = false;
      const cplx dp = horner_derivative(c, z[k]);
      cplx sum{0.0};
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      cplx w;
      if (dp == cplx{0.0}) {
        w = cplx(1e-8 * (1.0 + std::abs(z[k])), 1e-8);
      } else {
        const cplx ratio = p / dp;
        w = ratio / (1.0 - ratio * sum);
      }
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
      z[k] -= w;
      if (std::abs(w) <= 2.0 * eps * std::abs(z[k])) done[k] = true;
    }
    if (all_done) return true;
  }
  return std::all_of(done.begin(), done.end(), [](bool b) { return b; });
}

/// One Newton step in whichever affine chart keeps |t| ≤ 1; kept only if it
/// lowers the relative residual.
inline cplx polish(std::span<const cplx> c, cplx z) {
  const auto rel = [&](cplx t) { return std::abs(horner(c, t)) / abs_horner(c, std::abs(t)); };
  for (int step = 0; step < 3; ++step) {
    cplx candidate;
    if (std::abs(z) <= 1.0) {
      const cplx dp = horner_derivative(c, z);
      if (dp == cplx{0.0}) break;
      candidate = z - horner(c, z) / dp;
    } else {
      std::vector<cplx> rev(c.rbegin(), c.rend());
      const cplx s = 1.0 / z;
      const cplx dp = horner_derivative(rev, s);
      if (dp == cplx{0.0}) break;
      candidate = 1.0 / (s - horner(rev, s) / dp);
    }
    if (!(rel(candidate) < rel(z))) break;
    z = candidate;
  }
  return z;
}

inline double affine_distance(cplx z, cplx w) {
  return std::abs(z - w) / (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
}

struct Cluster {
  cplx center;
  int multiplicity;
};

/// Single-linkage groups of indices whose pairwise affine chordal distance is
/// at most `threshold`.
inline std::vector<std::vector<int>> link_groups(const std::vector<cplx>& z, double threshold) {
  const int n = static_cast<int>(z.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (affine_distance(z[i], z[j]) <= threshold) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

/// Merges numerically split multiple roots. A candidate group of m roots is
/// merged when its spread is consistent with the perturbation an m-fold root
/// suffers under a backward error of a few ulps.
inline std::vector<Cluster> cluster_roots(std::span<const cplx> c, const std::vector<cplx>& z) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int n = static_cast<int>(c.size()) - 1;
  const double backward = 16.0 * std::max(1, n) * eps;
  std::vector<Cluster> out;
  for (const auto& group : link_groups(z, 1e-3)) {
    const int m = static_cast<int>(group.size());
    cplx center{0.0};
    for (int i : group) center += z[i];
    center /= static_cast<double>(m);
    if (m == 1) {
      out.push_back({polish(c, center), 1});
      continue;
    }
    double spread = 0.0;
    for (int i : group) spread = std::max(spread, affine_distance(z[i], center));
    const cplx am = taylor_coefficient(c, center, m);
    // Coefficient errors of a few ulps of the largest coefficient (from
    // rotating or expanding the input) dominate the local rounding error.
    double cmax = 0.0;
    for (const auto& ci : c) cmax = std::max(cmax, std::abs(ci));
    double powers = 0.0;
    for (int i = 0; i <= n; ++i) powers += std::pow(std::abs(center), i);
    const double scale = std::max(abs_horner(c, std::abs(center)), cmax * powers);
    const double predicted =
        std::abs(am) > 0.0 ? std::pow(backward * scale / std::abs(am), 1.0 / m) / (1.0 + std::norm(center)) : 1.0;
    if (spread <= 50.0 * predicted + 1e-14) {
      out.push_back({center, m});
      continue;
    }
    std::vector<cplx> sub;
    for (int i : group) sub.push_back(z[i]);
    for (const auto& g : link_groups(sub, tol::kRootCluster)) {
      cplx cc{0.0};
      for (int i : g) cc += sub[i];
      cc /= static_cast<double>(g.size());
      out.push_back({g.size() == 1 ? polish(c, cc) : cc, static_cast<int>(g.size())});
    }
  }
  return out;
}

}  // namespace detail

/// All projective roots of f over ℂ, multiplicities summing to deg f.
template <Scalar T>
ProjectiveRootSet roots(const BinaryForm<T>& form) {
  ProjectiveRootSet result;
  const ComplexForm f = form.complexified();
  if (f.is_zero()) {
    result.degenerate = true;
    return result;
  }
  const int d = f.degree();
  if (d == 0) return result;

  // Rotate so that the chart's point at infinity (1, 0) is where |f| is
  // largest on a grid of 2d + 2 real directions.
  double best_phi = 0.0, best_val = -1.0;
  for (int j = 0; j < 2 * d + 2; ++j) {
    const double phi = std::numbers::pi * (j + 0.5) / (2 * d + 2);
    const double v = std::abs(f(cplx(std::cos(phi)), cplx(std::sin(phi))));
    if (v > best_val) {
      best_val = v;
      best_phi = phi;
    }
  }
  const ComplexForm g = rotate(f, best_phi);
  // g(t, 1) = Σ g_i t^i with g_d = g(1, 0) ≠ 0.
  std::vector<cplx> c(g.coeffs().begin(), g.coeffs().end());

  std::vector<cplx> z;
  if (!detail::aberth_roots(c, z)) z = detail::companion_roots(c);

  const double cs = std::cos(best_phi), sn = std::sin(best_phi);
  for (const auto& cl : detail::cluster_roots(c, z)) {
    // Point (t, 1) in rotated coordinates maps to R(t, 1).
    const ComplexLinear p{cs * cl.center - sn, sn * cl.center + cs};
    result.roots.push_back({canonical_direction(p), cl.multiplicity});
  }

  // Enforce the minimum separation between stored roots.
  for (std::size_t i = 0; i < result.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < result.roots.size();) {
      if (projective_distance(result.roots[i].direction, result.roots[j].direction) <= tol::kRootCluster) {
        result.roots[i].multiplicity += result.roots[j].multiplicity;
        result.roots.erase(result.roots.begin() + static_cast<std::ptrdiff_t>(j));
      } else {
        ++j;
      }
    }
  }
  return result;
}

}  // namespace bform
