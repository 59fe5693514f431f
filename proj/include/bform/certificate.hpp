#pragma once

// First-order certificate for critical rank-k tensors: g = Σ μ_i l_i^d is
// critical for f exactly when f - g lies in the normal space
// Π (l_i^⊥)² · Sym^{d-2k}, i.e. f = Σ μ_i l_i^d + h · Π (l_i^⊥)².

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "bform/form.hpp"
#include "bform/roots.hpp"

namespace bform {

template <Scalar T>
struct Summand {
  T mu{};
  LinearForm<T> l;
};

template <Scalar T>
BinaryForm<T> sum_of_powers(std::span<const Summand<T>> summands, int d) {
  auto g = BinaryForm<T>::zero(d);
  for (const auto& s : summands) g += s.mu * power(s.l, d);
  return g;
}

template <Scalar T>
struct Certificate {
  /// The cofactor h of degree d - 2k.
  BinaryForm<T> cofactor;
  /// ‖f - g - h·Q‖ / ‖f‖.
  double residual = 0.0;
};

/// Least-squares fit of r by h·Q over h ∈ Sym^{deg r - deg Q}, in the
/// Bombieri norm. Returns h and the absolute residual ‖r - h·Q‖.
template <Scalar T>
std::pair<BinaryForm<T>, double> fit_multiple(const BinaryForm<T>& r, const BinaryForm<T>& q) {
  const int d = r.degree();
  const int e = d - q.degree();
  if (e < 0) throw Error(ErrorCode::InvalidArgument, "divisor degree exceeds dividend degree");
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  Mat a = Mat::Zero(d + 1, e + 1);
  Vec b(d + 1);
  std::vector<double> w(d + 1);
  for (int i = 0; i <= d; ++i) {
    w[i] = 1.0 / std::sqrt(binomial(d, i));
    b(i) = r[i] * w[i];
  }
  for (int j = 0; j <= e; ++j)
    for (int i = 0; i <= q.degree(); ++i) a(i + j, j) = q[i] * w[i + j];
  const Vec h = a.colPivHouseholderQr().solve(b);
  std::vector<T> hc(h.data(), h.data() + h.size());
  BinaryForm<T> cofactor(std::move(hc));
  const double res = (r - cofactor * q).norm();
  return {std::move(cofactor), res};
}

/// Π_i perp(l_i)^2.
template <Scalar T>
BinaryForm<T> normal_generator(std::span<const Summand<T>> summands) {
  BinaryForm<T> q({T{1}});
  for (const auto& s : summands) {
    const auto p = as_form(perp(s.l));
    q = q * p * p;
  }
  return q;
}

/// Checks the decomposition f = Σ μ_i l_i^d + h·Π (l_i^⊥)². A residual below
/// tol::kCertificate certifies that Σ μ_i l_i^d is a critical rank-k tensor.
template <Scalar T>
Certificate<T> certify(const BinaryForm<T>& f, std::span<const Summand<T>> summands) {
  const int d = f.degree();
  const int k = static_cast<int>(summands.size());
  if (k < 1 || 2 * k > d) throw Error(ErrorCode::InvalidArgument, "certify needs 1 <= k and 2k <= d");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (projective_distance(summands[i].l, summands[j].l) <= tol::kCollapse)
        throw Error(ErrorCode::CollapsedDirections, "summand directions coincide");
  const auto r = f - sum_of_powers(summands, d);
  auto [h, res] = fit_multiple(r, normal_generator(summands));
  const double scale = f.norm();
  return {std::move(h), scale > 0.0 ? res / scale : res};
}

template <Scalar T>
Certificate<T> certify(const BinaryForm<T>& f, const std::vector<Summand<T>>& summands) {
  return certify(f, std::span<const Summand<T>>(summands));
}

}  // namespace bform
