#pragma once

// Real counts for a real form: distinct real roots, real critical rank-one
// tensors, and (for quartics) real critical rank-2 tensors. A critical rank-2
// tensor counts as real when the tensor g is real, whether its summands are
// real or a conjugate pair; the rank-2 count is read off the complex census.

#include <optional>

#include "bform/eigenpairs.hpp"
#include "bform/rank_k.hpp"
#include "bform/roots.hpp"

namespace bform {

struct RealCounts {
  int real_roots = 0;
  int real_crit1 = 0;
  /// Quartics only.
  std::optional<int> real_crit2;
  /// f and D(f) have simple roots, so the parity statements apply.
  bool simple = false;
  /// The rank-2 census reached its expected size.
  bool complete = false;
};

inline int count_real_eigen(const EigenResult& r) {
  const auto& pairs = std::get<std::vector<CriticalRank1>>(r);
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [](const CriticalRank1& e) { return e.is_real; }));
}

inline int count_real_points(const RankKSearch& s) {
  return static_cast<int>(
      std::count_if(s.points.begin(), s.points.end(), [](const CriticalRankK& p) { return p.is_real && !p.boundary; }));
}

inline RealCounts count_real(const RealForm& f, const SearchBudget& budget = {}) {
  const auto result = eigen_pairs(f);
  if (is_circle(result))
    throw Error(ErrorCode::DegenerateInput, "f is a multiple of (x^2+y^2)^(d/2); its critical set is a circle");
  RealCounts out;
  const auto zeros = roots(f);
  out.real_roots = zeros.count_real();
  out.real_crit1 = count_real_eigen(result);
  const auto& pairs = std::get<std::vector<CriticalRank1>>(result);
  out.simple = zeros.all_simple() &&
               std::all_of(pairs.begin(), pairs.end(), [](const CriticalRank1& e) { return e.multiplicity == 1; });
  if (f.degree() == 4) {
    const auto search = critical_rank_k(f, 2, Field::Complex, budget);
    out.real_crit2 = count_real_points(search);
    out.complete = !search.budget_exhausted;
  }
  return out;
}

}  // namespace bform
