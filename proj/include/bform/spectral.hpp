#pragma once

// Spectral decomposition of a binary form over its own critical rank-one
// tensors, and the explicit decomposition of (x² + y²)^{d/2} over d/2 + 1
// consecutive vertices of a regular (d + 2)-gon.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "bform/eigenpairs.hpp"
#include "bform/form.hpp"
#include "bform/rank_k.hpp"

namespace bform {

struct SpectralDecomposition {
  /// Eigenpairs in basis order (decreasing |λ|).
  std::vector<CriticalRank1> eigen;
  /// v_i^d, one per distinct eigenvector.
  std::vector<ComplexForm> basis;
  std::vector<cplx> coeffs;
  /// ‖f - Σ c_i v_i^d‖.
  double residual = 0.0;
  /// Numerical rank of the basis (cutoff 1e-8·σ_max).
  int rank = 0;
  /// D(f) has a repeated root; the basis may not span H_f and the
  /// coefficients are the minimum-norm least-squares solution.
  bool multiple_roots = false;
  /// Singular-space membership of the decomposed form.
  double membership = 0.0;
};

namespace detail {

struct LeastSquares {
  std::vector<cplx> coeffs;
  double residual = 0.0;
  int rank = 0;
};

/// Minimum-norm least squares g ≈ Σ c_i basis_i in the Bombieri norm.
inline LeastSquares solve_in_basis(const ComplexForm& g, std::span<const ComplexForm> basis) {
  const int d = g.degree();
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXcd a(d + 1, n);
  Eigen::VectorXcd b(d + 1);
  for (int i = 0; i <= d; ++i) {
    const double w = 1.0 / std::sqrt(binomial(d, i));
    b(i) = g[i] * w;
    for (int j = 0; j < n; ++j) a(i, j) = basis[j][i] * w;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-8 * sv(0) : 0.0;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) continue;
    ++rank;
    x += svd.matrixV().col(i) * (svd.matrixU().col(i).adjoint() * b)(0) / sv(i);
  }
  LeastSquares out;
  out.coeffs.assign(x.data(), x.data() + n);
  auto recon = ComplexForm::zero(d);
  for (int j = 0; j < n; ++j) recon += out.coeffs[j] * basis[j];
  out.residual = (g - recon).norm();
  out.rank = rank;
  return out;
}

}  // namespace detail

/// f = Σ c_i v_i^d over the critical rank-one tensors of f.
template <Scalar T>
SpectralDecomposition spectral_decompose(const BinaryForm<T>& form) {
  const ComplexForm f = form.complexified();
  auto result = eigen_pairs(f);
  if (is_circle(result))
    throw Error(ErrorCode::DegenerateInput, "f is a multiple of (x^2+y^2)^(d/2); use the regular-polygon decomposition");
  SpectralDecomposition out;
  out.eigen = std::get<std::vector<CriticalRank1>>(result);
  out.membership = singular_space(f).membership(f);
  for (const auto& e : out.eigen) {
    out.basis.push_back(power(e.v, f.degree()));
    if (e.multiplicity > 1) out.multiple_roots = true;
  }
  auto ls = detail::solve_in_basis(f, out.basis);
  out.coeffs = std::move(ls.coeffs);
  out.residual = ls.residual;
  out.rank = ls.rank;
  return out;
}

/// Coefficients of g over the eigenbasis of f; g is expected to lie in H_f.
template <Scalar T>
std::vector<cplx> express_in_eigenbasis(const BinaryForm<T>& form, const ComplexForm& g, double* residual = nullptr) {
  const ComplexForm f = form.complexified();
  f.require_same_degree(g);
  auto result = eigen_pairs(f);
  if (is_circle(result))
    throw Error(ErrorCode::DegenerateInput, "f is a multiple of (x^2+y^2)^(d/2); its eigenbasis is not finite");
  std::vector<ComplexForm> basis;
  for (const auto& e : std::get<std::vector<CriticalRank1>>(result)) basis.push_back(power(e.v, f.degree()));
  auto ls = detail::solve_in_basis(g, basis);
  if (residual) *residual = ls.residual;
  return ls.coeffs;
}

template <Scalar T>
std::vector<cplx> express_in_eigenbasis(const BinaryForm<T>& f, const CriticalRankK& g, double* residual = nullptr) {
  return express_in_eigenbasis(f, g.tensor, residual);
}

struct RezDecomposition {
  int d = 0;
  double phi = 0.0;
  double c_d = 0.0;
  /// l_k = cos(2kπ/(d+2) + φ) x + sin(2kπ/(d+2) + φ) y, k = 0..d/2.
  std::vector<RealLinear> summands;
  /// ‖(x² + y²)^{d/2} - c_d Σ l_k^d‖.
  double residual = 0.0;
};

/// (x² + y²)^{d/2} = c_d Σ_{k=0}^{d/2} l_k^d. Since ⟨l^d, (x²+y²)^{d/2}⟩ = 1
/// for unit l, c_d = ‖(x²+y²)^{d/2}‖² / (d/2 + 1).
inline RezDecomposition rez(int d, double phi) {
  if (d < 2 || d % 2 != 0) throw Error(ErrorCode::OddDegree, "the polygon decomposition needs an even degree >= 2");
  RezDecomposition out;
  out.d = d;
  out.phi = phi;
  const RealForm q = circle_power(d);
  auto sum = RealForm::zero(d);
  for (int k = 0; k <= d / 2; ++k) {
    const double angle = 2.0 * k * std::numbers::pi / (d + 2) + phi;
    out.summands.push_back({std::cos(angle), std::sin(angle)});
    sum += power(out.summands.back(), d);
  }
  out.c_d = q.norm2() / bombieri_dot(sum, q);
  out.residual = (q - out.c_d * sum).norm();
  return out;
}

}  // namespace bform
