#pragma once

// Critical rank-k tensors: critical points of g ↦ ‖f - g‖² on the k-th secant
// variety of the cone of d-th powers.
//
// Honest points g = Σ μ_i l_i^d are found by multi-start Newton on the
// first-order conditions
//     ⟨f - g, l_i^d⟩ = 0,   ⟨f - g, l_i^{d-1} l_i^⊥⟩ = 0,
// in the real chart l = cos θ x + sin θ y or the complex affine chart
// l = x + t y (evaluated in two rotated frames so no direction is at
// infinity in both). Points on the tangential boundary,
// g = μ l^d + ν l^{d-1} l^⊥ + Σ_{i≥3} μ_i l_i^d, are found by Gauss–Newton on
// the limit conditions, where f - g must vanish to order four at l.
// Every reported point is re-checked against the gradient and the normal-space
// certificate in chart-independent form.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "bform/certificate.hpp"
#include "bform/eigenpairs.hpp"
#include "bform/form.hpp"
#include "bform/parallel.hpp"
#include "bform/roots.hpp"

namespace bform {

struct SearchBudget {
  /// Number of Newton starts; 0 selects 200·k.
  int starts = 0;
  int max_newton_iters = 100;
  std::uint64_t seed = 0;

  int resolved_starts(int k) const { return starts > 0 ? starts : 200 * k; }
};

/// ν l^{d-1} l^⊥: the tangent-line part of a boundary point.
struct TangentTerm {
  cplx nu;
  ComplexLinear l;
};

struct CriticalRankK {
  int k = 0;
  /// k summands for an honest point; k - 1 for a boundary point, the first of
  /// which shares its direction with the tangent term.
  std::vector<Summand<cplx>> summands;
  std::optional<TangentTerm> tangent;
  ComplexForm tensor;
  /// The cofactor h of degree d - 2k in f = g + h·Q.
  ComplexForm cofactor;
  double distance = 0.0;
  double grad_residual = 0.0;
  double cert_residual = 0.0;
  bool boundary = false;
  /// The tensor g is real.
  bool is_real = false;
  /// Number of starts that converged to this point.
  int hits = 0;
};

struct RankKSearch {
  std::vector<CriticalRankK> points;
  /// The search cannot claim to have saturated: nothing was found, fewer
  /// points than the known generic count, or (without a known count) some
  /// point was reached by a single start.
  bool budget_exhausted = false;
  int starts = 0;
  int converged = 0;

  int honest_count() const {
    return static_cast<int>(std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.boundary; }));
  }
  int boundary_count() const { return static_cast<int>(points.size()) - honest_count(); }
};

namespace detail {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;

/// Taylor coefficient of order m of t ↦ h(1, t) at t.
template <Scalar T>
T chart_taylor(const BinaryForm<T>& h, const T& t, int m) {
  const int d = h.degree();
  T acc{};
  for (int e = d; e >= m; --e) acc = acc * t + binomial(e, m) * h[d - e];
  return acc;
}

/// Affine chart l = x + t y on a fixed (rotated) form.
struct ComplexChart {
  int d = 0;
  int k = 0;
  ComplexForm f;

  void evaluate(const VecC& x, VecC& F, MatC* J) const {
    F.setZero(2 * k);
    if (J) J->setZero(2 * k, 2 * k);
    for (int i = 0; i < k; ++i) {
      const cplx u = x(i);
      F(i) = chart_taylor(f, u, 0);
      F(k + i) = chart_taylor(f, u, 1);
      if (J) {
        (*J)(i, i) += chart_taylor(f, u, 1);
        (*J)(k + i, i) += 2.0 * chart_taylor(f, u, 2);
      }
      for (int j = 0; j < k; ++j) {
        const cplx w = x(j), mu = x(k + j);
        const cplx p = 1.0 + u * w;
        const cplx p2 = d >= 2 ? std::pow(p, d - 2) : cplx(0.0);
        const cplx p1 = p2 * p;
        const cplx p0 = p1 * p;
        // T_E(u, w) = μ p^d,  T_G(u, w) = μ d w p^{d-1}.
        F(i) -= mu * p0;
        F(k + i) -= mu * double(d) * w * p1;
        if (!J) continue;
        (*J)(i, i) -= mu * double(d) * p1 * w;
        (*J)(i, j) -= mu * double(d) * p1 * u;
        (*J)(i, k + j) -= p0;
        (*J)(k + i, i) -= mu * double(d) * double(d - 1) * w * w * p2;
        (*J)(k + i, j) -= mu * double(d) * (p1 + double(d - 1) * w * u * p2);
        (*J)(k + i, k + j) -= double(d) * w * p1;
      }
    }
  }

  /// μ minimizing the conditions ⟨f - g, l_i^d⟩ = 0 for fixed directions.
  bool project_weights(VecC& x) const {
    MatC a(k, k);
    VecC b(k);
    for (int i = 0; i < k; ++i) {
      b(i) = chart_taylor(f, x(i), 0);
      for (int j = 0; j < k; ++j) a(i, j) = std::pow(1.0 + x(i) * x(j), d);
    }
    Eigen::FullPivLU<MatC> lu(a);
    if (!lu.isInvertible()) return false;
    x.tail(k) = lu.solve(b);
    return true;
  }
};

/// Angle chart l = cos θ x + sin θ y; θ real for the real search and
/// complex for the complex one (every non-isotropic direction is reached and
/// l·l = 1 holds identically).
template <Scalar T>
struct AngleChart {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  int d = 0;
  int k = 0;
  BinaryForm<T> f, fx, fy, fxx, fxy, fyy;

  AngleChart(int d_, int k_, BinaryForm<T> form) : d(d_), k(k_), f(std::move(form)) {
    fx = f.dx();
    fy = f.dy();
    fxx = fx.dx();
    fxy = fx.dy();
    fyy = fy.dy();
  }

  void evaluate(const Vec& x, Vec& F, Mat* J) const {
    F.setZero(2 * k);
    if (J) J->setZero(2 * k, 2 * k);
    for (int i = 0; i < k; ++i) {
      const T th = x(i), c = std::cos(th), s = std::sin(th);
      const T gx = fx(c, s), gy = fy(c, s);
      F(i) = f(c, s);
      F(k + i) = -s * gx + c * gy;
      if (J) {
        (*J)(i, i) += -s * gx + c * gy;
        (*J)(k + i, i) += s * s * fxx(c, s) - 2.0 * s * c * fxy(c, s) + c * c * fyy(c, s) - c * gx - s * gy;
      }
      for (int j = 0; j < k; ++j) {
        const T mu = x(k + j);
        const T p = std::cos(th - x(j)), q = std::sin(th - x(j));
        const T p2 = d >= 2 ? T(std::pow(p, d - 2)) : T(0.0);
        const T p1 = p2 * p, p0 = p1 * p;
        // T_E = μ p^d,  T_G = ∂_θi T_E = -μ d p^{d-1} q.
        F(i) -= mu * p0;
        F(k + i) += mu * double(d) * p1 * q;
        if (!J) continue;
        const T dE = -mu * double(d) * p1 * q;
        (*J)(i, i) -= dE;
        (*J)(i, j) += dE;
        (*J)(i, k + j) -= p0;
        const T dG = -mu * double(d) * (p0 - double(d - 1) * p2 * q * q);
        (*J)(k + i, i) -= dG;
        (*J)(k + i, j) += dG;
        (*J)(k + i, k + j) += double(d) * p1 * q;
      }
    }
  }

  bool project_weights(Vec& x) const {
    Mat a(k, k);
    Vec b(k);
    for (int i = 0; i < k; ++i) {
      b(i) = f(std::cos(x(i)), std::sin(x(i)));
      for (int j = 0; j < k; ++j) a(i, j) = std::pow(std::cos(x(i) - x(j)), d);
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) return false;
    x.tail(k) = lu.solve(b);
    return true;
  }
};

/// Boundary chart g = μ l^d + ν l^{d-1} y + Σ_{j≥3} μ_j l_j^d with l = x + t y.
/// Unknowns [t, μ, ν, t_3.., μ_3..]; f - g must vanish to order 4 at t and
/// to order 2 at each t_j.
template <Scalar T>
struct TangentialChart {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  int d = 0;
  int k = 0;
  BinaryForm<T> f;

  int unknowns() const { return 3 + 2 * (k - 2); }
  int equations() const { return 4 + 2 * (k - 2); }
  static LinearForm<T> line(const T& t) { return {T{1}, t}; }
  static BinaryForm<T> y_form() { return BinaryForm<T>({T{1}, T{0}}); }

  BinaryForm<T> model(const Vec& x) const {
    const auto l = line(x(0));
    auto g = x(1) * power(l, d) + x(2) * (power(l, d - 1) * y_form());
    for (int j = 0; j < k - 2; ++j) g += x(3 + k - 2 + j) * power(line(x(3 + j)), d);
    return g;
  }

  std::vector<BinaryForm<T>> partials(const Vec& x) const {
    const auto l = line(x(0));
    const auto y = y_form();
    std::vector<BinaryForm<T>> out;
    out.push_back(x(1) * double(d) * (power(l, d - 1) * y) + x(2) * double(d - 1) * (power(l, d - 2) * y * y));
    out.push_back(power(l, d));
    out.push_back(power(l, d - 1) * y);
    for (int j = 0; j < k - 2; ++j) out.push_back(x(3 + k - 2 + j) * double(d) * (power(line(x(3 + j)), d - 1) * y));
    for (int j = 0; j < k - 2; ++j) out.push_back(power(line(x(3 + j)), d));
    return out;
  }

  void evaluate(const Vec& x, Vec& F, Mat* J) const {
    const auto r = f - model(x);
    F.setZero(equations());
    std::vector<BinaryForm<T>> dg;
    if (J) {
      J->setZero(equations(), unknowns());
      dg = partials(x);
    }
    int row = 0;
    auto add_point = [&](int t_index, int orders) {
      const T t = x(t_index);
      for (int m = 0; m < orders; ++m, ++row) {
        F(row) = chart_taylor(r, t, m);
        if (!J) continue;
        for (int p = 0; p < unknowns(); ++p) (*J)(row, p) = -chart_taylor(dg[p], t, m);
        (*J)(row, t_index) += double(m + 1) * chart_taylor(r, t, m + 1);
      }
    };
    add_point(0, 4);
    for (int j = 0; j < k - 2; ++j) add_point(3 + j, 2);
  }

  /// Least-squares weights (μ, ν, μ_j) for fixed points.
  void project_weights(Vec& x) const {
    std::vector<BinaryForm<T>> basis;
    const auto l = line(x(0));
    basis.push_back(power(l, d));
    basis.push_back(power(l, d - 1) * y_form());
    for (int j = 0; j < k - 2; ++j) basis.push_back(power(line(x(3 + j)), d));
    Mat a(d + 1, basis.size());
    Vec b(d + 1);
    for (int i = 0; i <= d; ++i) {
      const double w = 1.0 / std::sqrt(binomial(d, i));
      b(i) = f[i] * w;
      for (std::size_t c = 0; c < basis.size(); ++c) a(i, c) = basis[c][i] * w;
    }
    const Vec sol = a.colPivHouseholderQr().solve(b);
    x(1) = sol(0);
    x(2) = sol(1);
    for (int j = 0; j < k - 2; ++j) x(3 + k - 2 + j) = sol(2 + j);
  }
};

enum class NewtonStatus { Converged, Diverged, Collapsed, Stalled };

/// Newton (square systems) or Gauss–Newton (overdetermined) with a simple
/// backtracking safeguard. `points` is the number of leading entries of x
/// that are summand positions; they must stay apart.
template <class System, class Vec, class Mat>
NewtonStatus newton_solve(const System& sys, Vec& x, int points, int max_iters, bool angular) {
  Vec F, Fn;
  Mat J;
  sys.evaluate(x, F, &J);
  int tail = -1;
  for (int iter = 0; iter < max_iters; ++iter) {
    Vec dx = J.rows() == J.cols() ? Vec(J.partialPivLu().solve(-F)) : Vec(J.colPivHouseholderQr().solve(-F));
    if (!dx.allFinite()) return NewtonStatus::Diverged;
    double alpha = 1.0;
    Vec xn = x + dx;
    sys.evaluate(xn, Fn, nullptr);
    const double f0 = F.norm();
    for (int ls = 0; ls < 4 && !(Fn.norm() < f0) && f0 > 0.0; ++ls) {
      alpha *= 0.5;
      xn = x + alpha * dx;
      sys.evaluate(xn, Fn, nullptr);
    }
    x = xn;
    if (!x.allFinite()) return NewtonStatus::Diverged;
    for (int i = 0; i < points; ++i) {
      if (!angular && std::abs(x(i)) > 1e6) return NewtonStatus::Diverged;
      if (angular && std::abs(std::imag(to_complex(x(i)))) > 30.0) return NewtonStatus::Diverged;
      for (int j = i + 1; j < points; ++j) {
        double gap;
        if (angular) {
          gap = std::abs(std::sin(x(i) - x(j)));
        } else {
          gap = affine_distance(to_complex(x(i)), to_complex(x(j)));
        }
        if (gap < 1e-9) return NewtonStatus::Collapsed;
      }
    }
    sys.evaluate(x, F, &J);
    const double step = alpha * dx.norm();
    if (tail < 0 && step <= 1e-13 * (1.0 + x.norm())) tail = 2;
    if (tail >= 0 && tail-- == 0) return NewtonStatus::Converged;
  }
  return tail >= 0 ? NewtonStatus::Converged : NewtonStatus::Stalled;
}

/// Unit (bilinear) representative of ℂ-projective direction with its scale
/// s, so that l = s·unit.
inline std::pair<ComplexLinear, cplx> unit_with_scale(const ComplexLinear& l) {
  const cplx q = l.a * l.a + l.b * l.b;
  cplx s = std::abs(q) > 1e-24 ? std::sqrt(q) : cplx(l.norm());
  ComplexLinear u = (1.0 / s) * l;
  if (u.a.real() < -1e-14 || (std::abs(u.a.real()) <= 1e-14 && u.b.real() < 0.0)) {
    u = -u;
    s = -s;
  }
  return {u, s};
}

inline bool is_real_linear(const ComplexLinear& l) {
  return std::abs(l.a.imag()) <= tol::kReal && std::abs(l.b.imag()) <= tol::kReal;
}

/// Raw solution of one start in original coordinates.
struct Candidate {
  std::vector<Summand<cplx>> summands;
  std::optional<TangentTerm> tangent;
};

/// Bilinear ⟨r, ·⟩ against each partial derivative of the model, times 2.
inline double gradient_norm(const ComplexForm& r, const std::vector<ComplexForm>& partials) {
  double s = 0.0;
  for (const auto& p : partials) s += std::norm(2.0 * bilinear_dot(r, p));
  return std::sqrt(s);
}

inline ComplexForm tensor_of(const Candidate& c, int d) {
  auto g = sum_of_powers(std::span<const Summand<cplx>>(c.summands), d);
  if (c.tangent) g += c.tangent->nu * (power(c.tangent->l, d - 1) * as_form(perp(c.tangent->l)));
  return g;
}

/// Gradient and certificate checks; nullopt when the candidate is not a
/// critical point at the requested tolerance.
/// Drops imaginary parts at rounding level so real summands print as real.
inline Candidate snap_real(Candidate c) {
  const auto snap = [](cplx& v, double scale) {
    if (std::abs(v.imag()) <= 1e-14 * std::max(scale, std::abs(v))) v = v.real();
  };
  for (auto& s : c.summands) {
    const double scale = std::abs(s.l.a) + std::abs(s.l.b);
    snap(s.l.a, scale);
    snap(s.l.b, scale);
    snap(s.mu, 0.0);
  }
  if (c.tangent) {
    snap(c.tangent->nu, 0.0);
    const double scale = std::abs(c.tangent->l.a) + std::abs(c.tangent->l.b);
    snap(c.tangent->l.a, scale);
    snap(c.tangent->l.b, scale);
  }
  return c;
}

inline std::optional<CriticalRankK> assess(const ComplexForm& f, int k, const Candidate& raw, double tolerance) {
  const Candidate c = snap_real(raw);
  const int d = f.degree();
  const double fn = f.norm();
  CriticalRankK out;
  out.k = k;
  out.summands = c.summands;
  out.tangent = c.tangent;
  out.boundary = c.tangent.has_value();
  out.tensor = tensor_of(c, d);
  const ComplexForm r = f - out.tensor;
  out.distance = r.norm();

  std::vector<ComplexForm> partials;
  ComplexForm q({cplx(1.0)});
  for (std::size_t i = 0; i < c.summands.size(); ++i) {
    const auto& s = c.summands[i];
    const auto lp = as_form(perp(s.l));
    partials.push_back(power(s.l, d));
    if (i == 0 && c.tangent) {
      const cplx nu = c.tangent->nu;
      partials.push_back(power(s.l, d - 1) * lp);
      partials.push_back(s.mu * double(d) * (power(s.l, d - 1) * lp) +
                         nu * (double(d - 1) * (power(s.l, d - 2) * lp * lp) - power(s.l, d)));
      q = q * lp * lp * lp * lp;
    } else {
      partials.push_back(s.mu * double(d) * (power(s.l, d - 1) * lp));
      q = q * lp * lp;
    }
  }
  out.grad_residual = gradient_norm(r, partials);
  if (!(out.grad_residual <= tolerance * fn)) return std::nullopt;

  for (std::size_t i = 0; i < c.summands.size(); ++i)
    for (std::size_t j = i + 1; j < c.summands.size(); ++j)
      if (projective_distance(c.summands[i].l, c.summands[j].l) <= tol::kCollapse) return std::nullopt;
  if (c.tangent && std::abs(c.tangent->nu) <= tol::kCollapse * fn) return std::nullopt;

  auto [h, res] = fit_multiple(r, q);
  out.cofactor = std::move(h);
  out.cert_residual = res / fn;
  if (!(out.cert_residual <= tolerance)) return std::nullopt;
  out.is_real = imaginary_ratio(out.tensor) * out.tensor.max_abs_coeff() <= 1e-8 * fn;
  return out;
}

inline std::vector<Summand<cplx>> honest_summands(const VecC& x, int k, int d, double phi) {
  std::vector<Summand<cplx>> out;
  for (int i = 0; i < k; ++i) {
    const auto l = rotate(ComplexLinear{cplx(1.0), x(i)}, -phi);
    auto [u, s] = unit_with_scale(l);
    out.push_back({x(k + i) * std::pow(s, d), u});
  }
  return out;
}

template <Scalar T>
Candidate tangential_candidate(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x, int k, int d, double phi) {
  Candidate c;
  const auto l = rotate(ComplexLinear{cplx(1.0), to_complex(x(0))}, -phi);
  const auto m = rotate(ComplexLinear{cplx(0.0), cplx(1.0)}, -phi);
  auto [u, s] = unit_with_scale(l);
  const cplx alpha = m.a * u.a + m.b * u.b;
  const cplx beta = -m.a * u.b + m.b * u.a;
  const cplx mu = to_complex(x(1)), nu = to_complex(x(2));
  c.summands.push_back({mu * std::pow(s, d) + nu * std::pow(s, d - 1) * alpha, u});
  c.tangent = TangentTerm{nu * std::pow(s, d - 1) * beta, u};
  for (int j = 0; j < k - 2; ++j) {
    const auto lj = rotate(ComplexLinear{cplx(1.0), to_complex(x(3 + j))}, -phi);
    auto [uj, sj] = unit_with_scale(lj);
    c.summands.push_back({to_complex(x(3 + k - 2 + j)) * std::pow(sj, d), uj});
  }
  return c;
}

inline constexpr double kImagSpread = 0.5;

/// Chart rotations: the identity and a generic angle.
inline constexpr double kChartAngles[2] = {0.0, 0.9553166181245093};

inline cplx random_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

struct StartResult {
  std::optional<Candidate> candidate;
  /// Directions collapsed; positions of the merged pair for a tangential retry.
  std::optional<std::vector<cplx>> collapsed;
  int chart = 0;
};

inline void merge(RankKSearch& search, CriticalRankK point, double fn) {
  for (auto& p : search.points) {
    if ((p.tensor - point.tensor).norm() <= tol::kDedup * fn) {
      ++p.hits;
      return;
    }
  }
  point.hits = 1;
  search.points.push_back(std::move(point));
}

/// Number of complex critical points for a generic form, where it is known
/// (0 otherwise). Searches that know their target keep adding rounds of starts
/// until it is met.
inline int generic_count(int d, int k, Field field) {
  if (field == Field::Complex && d == 4 && k == 2) return 7;
  return 0;
}

inline constexpr int kMaxRounds = 4;

inline void finalize(RankKSearch& search, int expected = 0) {
  std::stable_sort(search.points.begin(), search.points.end(), [](const auto& a, const auto& b) {
    if (a.boundary != b.boundary) return !a.boundary;
    if (std::abs(a.distance - b.distance) > 1e-9 * std::max(1.0, a.distance)) return a.distance < b.distance;
    return false;
  });
  const int found = static_cast<int>(search.points.size());
  if (expected > 0 && found >= expected) {
    search.budget_exhausted = false;
    return;
  }
  search.budget_exhausted = found == 0 || (expected > 0 && found < expected) ||
                            std::any_of(search.points.begin(), search.points.end(), [](const auto& p) { return p.hits < 2; });
}

template <Scalar T>
std::optional<Candidate> solve_tangential(const BinaryForm<T>& rotated, int k, double phi, Eigen::Matrix<T, Eigen::Dynamic, 1> x,
                                          int max_iters) {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  TangentialChart<T> chart{rotated.degree(), k, rotated};
  chart.project_weights(x);
  const int points = 0;
  const auto status = newton_solve<TangentialChart<T>, Vec, Mat>(chart, x, points, max_iters, false);
  if (status != NewtonStatus::Converged) return std::nullopt;
  for (int j = 0; j < k - 2; ++j) {
    if (affine_distance(to_complex(x(0)), to_complex(x(3 + j))) < 1e-9) return std::nullopt;
    if (std::abs(x(3 + j)) > 1e6) return std::nullopt;
  }
  if (std::abs(x(0)) > 1e6) return std::nullopt;
  return tangential_candidate<T>(x, k, rotated.degree(), phi);
}

inline void require_search_input(const ComplexForm& f, int k) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroForm, "rank-k search on the zero form");
  if (k < 1 || 2 * k > f.degree()) throw Error(ErrorCode::InvalidArgument, "rank-k search needs 1 <= k and 2k <= d");
  if (is_rotation_invariant(f, apply_D(f)))
    throw Error(ErrorCode::DegenerateInput, "f is a multiple of (x^2+y^2)^(d/2); its critical set is positive-dimensional");
}

}  // namespace detail

/// Multi-start search for the critical rank-k tensors of f. With Field::Real
/// the search runs over real decompositions Σ μ_i (cos θ_i x + sin θ_i y)^d
/// (and real tangential points); with Field::Complex over all complex ones.
template <Scalar T>
RankKSearch critical_rank_k(const BinaryForm<T>& form, int k, Field field, const SearchBudget& budget = {},
                            double tolerance = tol::kGradient) {
  using namespace detail;
  const ComplexForm f = form.complexified();
  require_search_input(f, k);
  if (field == Field::Real && imaginary_ratio(f) > tol::kReal)
    throw Error(ErrorCode::InvalidArgument, "a real search needs a real form");
  const int d = f.degree();
  const double fn = f.norm();
  const int starts = budget.resolved_starts(k);
  const int iters = budget.max_newton_iters;

  RankKSearch search;
  search.starts = starts;
  std::vector<ComplexForm> rotated_c;
  std::vector<RealForm> rotated_r;
  for (double phi : kChartAngles) {
    rotated_c.push_back(rotate(f, phi));
    rotated_r.push_back(real_part(rotated_c.back()));
  }

  // Honest charts.
  auto run_start = [&](std::size_t index) -> StartResult {
    auto rng = task_rng(budget.seed, index);
    StartResult res;
    if (field == Field::Complex && index % 3 == 2) {
      // Affine chart: reaches isotropic directions, which the angle chart
      // only approaches at infinity.
      res.chart = static_cast<int>((index / 3) % 2);
      const ComplexChart chart{d, k, rotated_c[res.chart]};
      VecC x(2 * k);
      for (int i = 0; i < k; ++i) x(i) = random_disk(rng, 2.0);
      if (!chart.project_weights(x)) return res;
      const auto status = newton_solve<ComplexChart, VecC, MatC>(chart, x, k, iters, false);
      if (status == NewtonStatus::Converged) {
        res.candidate = Candidate{honest_summands(x, k, d, kChartAngles[res.chart]), std::nullopt};
      } else if (status == NewtonStatus::Collapsed && k >= 2) {
        res.collapsed = std::vector<cplx>(x.data(), x.data() + k);
      }
    } else if (field == Field::Complex) {
      const AngleChart<cplx> chart(d, k, f);
      std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
      std::normal_distribution<double> lift(0.0, kImagSpread);
      VecC x(2 * k);
      for (int i = 0; i < k; ++i) x(i) = cplx(angle(rng), lift(rng));
      if (!chart.project_weights(x)) return res;
      const auto status = newton_solve<AngleChart<cplx>, VecC, MatC>(chart, x, k, iters, true);
      if (status == NewtonStatus::Converged) {
        Candidate c;
        for (int i = 0; i < k; ++i) {
          auto [u, s] = unit_with_scale(ComplexLinear{std::cos(x(i)), std::sin(x(i))});
          c.summands.push_back({x(k + i) * std::pow(s, d), u});
        }
        res.candidate = std::move(c);
      } else if (status == NewtonStatus::Collapsed && k >= 2) {
        std::vector<cplx> t;
        for (int i = 0; i < k; ++i) t.push_back(std::tan(x(i)));
        res.collapsed = std::move(t);
      }
    } else {
      const AngleChart<double> chart(d, k, rotated_r[0]);
      std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
      VecR x(2 * k);
      for (int i = 0; i < k; ++i) x(i) = angle(rng);
      if (!chart.project_weights(x)) return res;
      const auto status = newton_solve<AngleChart<double>, VecR, MatR>(chart, x, k, iters, true);
      if (status == NewtonStatus::Converged) {
        Candidate c;
        for (int i = 0; i < k; ++i) {
          auto [u, s] = unit_with_scale(ComplexLinear{cplx(std::cos(x(i))), cplx(std::sin(x(i)))});
          c.summands.push_back({x(k + i) * std::pow(s, d), u});
        }
        res.candidate = std::move(c);
      } else if (status == NewtonStatus::Collapsed && k >= 2) {
        std::vector<cplx> t;
        for (int i = 0; i < k; ++i) t.push_back(std::tan(x(i)));
        res.collapsed = std::move(t);
      }
    }
    return res;
  };
  auto consider = [&](const std::optional<Candidate>& c) {
    if (!c) return;
    ++search.converged;
    if (auto p = assess(f, k, *c, tolerance)) {
      if (field == Field::Real) {
        p->is_real = true;
        for (auto& s : p->summands) s.mu = s.mu.real();
        if (p->tangent) p->tangent->nu = p->tangent->nu.real();
      }
      merge(search, std::move(*p), fn);
    }
  };
  const int expected = generic_count(d, k, field);
  const int rounds = expected > 0 ? kMaxRounds : 1;
  search.starts = 0;
  for (int round = 0; round < rounds; ++round) {
    const std::size_t offset = static_cast<std::size_t>(round) * static_cast<std::size_t>(starts);
    const auto honest = parallel_map<StartResult>(static_cast<std::size_t>(starts),
                                                      [&](std::size_t i) { return run_start(offset + i); });

    std::vector<std::optional<Candidate>> tangential;
    if (k >= 2) {
      // Dedicated tangential starts plus retries seeded by collapsed runs.
      const int tangential_starts = std::max(16, starts / 8);
      auto run_tangential = [&](std::size_t index) -> std::optional<Candidate> {
        auto rng = task_rng(budget.seed ^ 0x7A6E67656E7469ULL, index);
        const int chart = static_cast<int>(index % 2);
        if (field == Field::Complex) {
          Eigen::VectorXcd x(3 + 2 * (k - 2));
          x.setZero();
          x(0) = random_disk(rng, 3.0);
          for (int j = 0; j < k - 2; ++j) x(3 + j) = random_disk(rng, 3.0);
          return solve_tangential<cplx>(rotated_c[chart], k, kChartAngles[chart], x, iters);
        }
        std::normal_distribution<double> normal(0.0, 1.5);
        Eigen::VectorXd x(3 + 2 * (k - 2));
        x.setZero();
        x(0) = normal(rng);
        for (int j = 0; j < k - 2; ++j) x(3 + j) = normal(rng);
        return solve_tangential<double>(rotated_r[chart], k, kChartAngles[chart], x, iters);
      };
      tangential = parallel_map<std::optional<Candidate>>(static_cast<std::size_t>(tangential_starts),
                                                          [&](std::size_t i) { return run_tangential(offset + i); });

      for (const auto& h : honest) {
        if (!h.collapsed) continue;
        const auto& t = *h.collapsed;
        // Merge the closest pair into the tangency point; keep the rest.
        int bi = 0, bj = 1;
        double best = 2.0;
        for (int i = 0; i < k; ++i)
          for (int j = i + 1; j < k; ++j)
            if (const double g = affine_distance(t[i], t[j]); g < best) {
              best = g;
              bi = i;
              bj = j;
            }
        std::vector<cplx> rest;
        for (int i = 0; i < k; ++i)
          if (i != bi && i != bj) rest.push_back(t[i]);
        const cplx t0 = 0.5 * (t[bi] + t[bj]);
        const int chart = field == Field::Complex ? h.chart : 0;
        if (field == Field::Complex) {
          Eigen::VectorXcd x = Eigen::VectorXcd::Zero(3 + 2 * (k - 2));
          x(0) = t0;
          for (int j = 0; j < k - 2; ++j) x(3 + j) = rest[j];
          tangential.push_back(solve_tangential<cplx>(rotated_c[chart], k, kChartAngles[chart], x, iters));
        } else {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(3 + 2 * (k - 2));
          x(0) = t0.real();
          for (int j = 0; j < k - 2; ++j) x(3 + j) = rest[j].real();
          tangential.push_back(solve_tangential<double>(rotated_r[chart], k, kChartAngles[chart], x, iters));
        }
      }
    }

    for (const auto& h : honest) consider(h.candidate);
    for (const auto& c : tangential) consider(c);
    search.starts += starts;
    if (expected > 0 && static_cast<int>(search.points.size()) >= expected) break;
  }
  finalize(search, expected);
  return search;
}

/// The real critical rank-k tensor closest to f.
template <Scalar T>
CriticalRankK best_rank_k(const BinaryForm<T>& f, int k, const SearchBudget& budget = {}) {
  auto search = critical_rank_k(f, k, Field::Real, budget);
  if (search.points.empty()) throw Error(ErrorCode::BudgetExhausted, "no real critical point found within the budget");
  return *std::min_element(search.points.begin(), search.points.end(),
                           [](const auto& a, const auto& b) { return a.distance < b.distance; });
}

}  // namespace bform
