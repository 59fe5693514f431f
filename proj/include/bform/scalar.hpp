#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

namespace bform {

using cplx = std::complex<double>;

enum class Field { Real, Complex };

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, cplx>;

template <Scalar T>
constexpr Field field_of() {
  return is_complex_v<T> ? Field::Complex : Field::Real;
}

template <Scalar T>
inline T conj_if(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::conj(v);
  } else {
    return v;
  }
}

template <Scalar T>
inline double abs2(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::norm(v);
  } else {
    return v * v;
  }
}

inline cplx to_complex(double v) { return {v, 0.0}; }
inline cplx to_complex(const cplx& v) { return v; }

// Numerical thresholds shared by the whole library.
namespace tol {
// Absolute coefficient threshold below which a form is treated as zero.
inline constexpr double kZeroCoeff = 1e-13;
// Relative threshold ‖D(f)‖ ≤ kZeroD·‖f‖ for the rotation-invariant branch.
inline constexpr double kZeroD = 1e-13;
// Fubini–Study distance below which projective roots are merged.
inline constexpr double kRootCluster = 1e-7;
inline constexpr double kUnit = 1e-12;
inline constexpr double kGradient = 1e-8;
inline constexpr double kCertificate = 1e-8;
// Critical points whose tensors differ by less than kDedup·‖f‖ are identified.
inline constexpr double kDedup = 1e-6;
// Summand directions closer than this (Fubini–Study) count as collapsed.
inline constexpr double kCollapse = 1e-6;
// Imaginary parts below kReal·scale are treated as rounding noise.
inline constexpr double kReal = 1e-9;
}  // namespace tol

}  // namespace bform
