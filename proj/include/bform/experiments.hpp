#pragma once

// Sampling experiments over real forms: the sweep checking that a real form
// never has more real roots than real critical rank-one tensors (with matching
// parity), and the search for quartics realising each combination of real
// counts.

#include <chrono>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "bform/parallel.hpp"
#include "bform/real_counts.hpp"

namespace bform {

enum class Sampler { Gaussian, Product, Perturbed };

inline const char* to_string(Sampler s) {
  switch (s) {
    case Sampler::Gaussian: return "gaussian";
    case Sampler::Product: return "product";
    case Sampler::Perturbed: return "perturbed";
  }
  return "?";
}

/// Independent standard normal coefficients.
inline RealForm gaussian_form(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> c(d + 1);
  for (auto& x : c) x = n(rng);
  return RealForm(std::move(c));
}

/// A product of `real_roots` real linear forms and conjugate pairs, so the
/// number of real roots is prescribed.
inline RealForm product_form(int d, int real_roots, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  RealForm f({n(rng)});
  for (int i = 0; i < real_roots; ++i) {
    const double t = angle(rng);
    f = f * as_form(RealLinear{std::cos(t), std::sin(t)});
  }
  for (int i = 0; i < (d - real_roots) / 2; ++i) {
    const cplx a(n(rng), n(rng)), b(n(rng), n(rng));
    // (a x + b y)(ā x + b̄ y)
    f = f * RealForm({std::norm(b), 2.0 * (a * std::conj(b)).real(), std::norm(a)});
  }
  return f;
}

/// Random real-root count with the parity of d.
inline int random_root_count(int d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, d / 2);
  return d % 2 + 2 * pick(rng);
}

inline RealForm perturb(const RealForm& f, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, scale * f.norm());
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  for (auto& x : c) x += n(rng);
  return RealForm(std::move(c));
}

// ---------------------------------------------------------------------------
// Root / eigenvector sweep

struct RootBoundViolation {
  RealForm form;
  int real_roots = 0;
  int real_crit1 = 0;
  std::string reason;
};

struct RootBoundReport {
  int degree = 0;
  int samples = 0;
  /// Samples whose roots and eigenvectors were all simple; parity is only
  /// checked on these.
  int simple = 0;
  /// (real roots, real eigenvectors) → number of samples.
  std::map<std::pair<int, int>, int> histogram;
  std::vector<RootBoundViolation> violations;
};

inline std::optional<RootBoundViolation> check_root_bound(const RealForm& f) {
  const auto result = eigen_pairs(f);
  if (is_circle(result)) return std::nullopt;
  const auto zeros = roots(f);
  const auto& pairs = std::get<std::vector<CriticalRank1>>(result);
  RootBoundViolation v{f, zeros.count_real(), count_real_eigen(result), {}};
  const int d = f.degree();
  if (v.real_roots > v.real_crit1) {
    v.reason = "more real roots than real eigenvectors";
    return v;
  }
  const bool simple = zeros.all_simple() &&
                      std::all_of(pairs.begin(), pairs.end(), [](const CriticalRank1& e) { return e.multiplicity == 1; });
  if (simple && (v.real_roots % 2 != d % 2 || v.real_crit1 % 2 != d % 2)) {
    v.reason = "parity differs from the degree";
    return v;
  }
  return std::nullopt;
}

/// Samples alternate between Gaussian coefficients and products of linear
/// factors with a random number of real roots.
inline RootBoundReport root_bound_sweep(int d, int samples, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "the sweep needs degree >= 2");
  struct Sample {
    int roots = 0, crit1 = 0;
    bool simple = false;
    std::optional<RootBoundViolation> violation;
  };
  const auto results = parallel_map<Sample>(static_cast<std::size_t>(samples), [&](std::size_t i) {
    auto rng = task_rng(seed, i);
    const RealForm f = i % 2 == 0 ? gaussian_form(d, rng) : product_form(d, random_root_count(d, rng), rng);
    Sample s;
    const auto result = eigen_pairs(f);
    if (is_circle(result)) return s;
    const auto zeros = roots(f);
    const auto& pairs = std::get<std::vector<CriticalRank1>>(result);
    s.roots = zeros.count_real();
    s.crit1 = count_real_eigen(result);
    s.simple = zeros.all_simple() &&
               std::all_of(pairs.begin(), pairs.end(), [](const CriticalRank1& e) { return e.multiplicity == 1; });
    s.violation = check_root_bound(f);
    return s;
  });
  RootBoundReport report;
  report.degree = d;
  report.samples = samples;
  for (const auto& s : results) {
    ++report.histogram[{s.roots, s.crit1}];
    if (s.simple) ++report.simple;
    if (s.violation) report.violations.push_back(*s.violation);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Real-count table for quartics

struct TableRow {
  int real_roots = -1;  ///< -1 stands for "any".
  int real_crit1 = -1;
  int real_crit2 = 0;
  /// Row of the reference table (as opposed to a combination met on the way).
  bool listed = false;
  /// The reference table marks the row as realised.
  bool expected = false;
  bool found = false;
  std::optional<RealForm> witness;
  Sampler source = Sampler::Gaussian;
  int hits = 0;

  bool matches(int roots, int crit1, int crit2) const {
    return (real_roots < 0 || real_roots == roots) && (real_crit1 < 0 || real_crit1 == crit1) && real_crit2 == crit2;
  }
};

struct TableOptions {
  std::uint64_t seed = 0;
  /// Upper bound on sampled quartics.
  int samples = 20000;
  /// Wall-clock bound; checked between batches.
  double seconds = 600.0;
  int batch = 64;
  /// Keep sampling after every expected row has a witness.
  bool exhaustive = false;
  SearchBudget census;
};

struct TableReport {
  std::vector<TableRow> rows;
  int samples = 0;
  /// Samples with repeated roots or an incomplete census; not tabulated.
  int rejected = 0;
  double seconds = 0.0;
  bool time_limited = false;

  bool all_expected_found() const {
    return std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return !r.expected || r.found; });
  }
};

inline std::vector<TableRow> reference_rows() {
  std::vector<TableRow> rows;
  for (auto [a, b, c] : {std::tuple{0, 2, 3}, {2, 2, 3}, {0, 2, 5}, {2, 2, 5}, {0, 4, 3}, {2, 4, 3}, {4, 4, 3}, {0, 4, 5},
                         {2, 4, 5}})
    rows.push_back({a, b, c, true, true, false, std::nullopt});
  rows.push_back({4, 4, 5, true, false, false, std::nullopt});
  rows.push_back({-1, -1, 7, true, false, false, std::nullopt});
  return rows;
}

inline TableReport table_search(const TableOptions& opt) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  TableReport report;
  report.rows = reference_rows();
  // Recent samples per row; perturbations start from the rarest rows.
  std::vector<std::vector<RealForm>> seen(report.rows.size());
  constexpr std::size_t kKeep = 8;
  constexpr std::size_t kRarest = 3;

  struct Sample {
    RealForm form;
    Sampler source = Sampler::Gaussian;
    RealCounts counts;
    bool usable = false;
  };

  for (int start = 0; start < opt.samples; start += opt.batch) {
    const int n = std::min(opt.batch, opt.samples - start);
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < report.rows.size(); ++r)
      if (report.rows[r].found) order.push_back(r);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return report.rows[a].hits < report.rows[b].hits; });
    std::vector<RealForm> pool;
    for (std::size_t r = 0; r < std::min(order.size(), kRarest); ++r)
      pool.insert(pool.end(), seen[order[r]].begin(), seen[order[r]].end());
    const auto batch = parallel_map<Sample>(static_cast<std::size_t>(n), [&](std::size_t j) {
      const std::uint64_t i = static_cast<std::uint64_t>(start) + j;
      auto rng = task_rng(opt.seed, i);
      Sample s;
      s.source = static_cast<Sampler>(i % 3);
      if (s.source == Sampler::Perturbed && pool.empty()) s.source = Sampler::Gaussian;
      switch (s.source) {
        case Sampler::Gaussian: s.form = gaussian_form(4, rng); break;
        case Sampler::Product: s.form = product_form(4, random_root_count(4, rng), rng); break;
        case Sampler::Perturbed: {
          static constexpr double scales[] = {0.3, 0.1, 0.03};
          const auto& base = pool[(i / 6) % pool.size()];
          if (i % 2 == 0) {
            s.form = perturb(base, scales[(i / 6) % 3], rng);
          } else {
            // Adding a multiple of (x² + y²)² leaves D(f), hence the
            // eigenvectors, unchanged while moving the real roots.
            std::normal_distribution<double> shift(0.0, 1.0);
            s.form = base + shift(rng) * base.norm() * circle_power(4);
          }
          break;
        }
      }
      try {
        SearchBudget b = opt.census;
        b.seed = splitmix64(opt.seed ^ i);
        s.counts = count_real(s.form, b);
        s.usable = s.counts.simple && s.counts.complete;
      } catch (const Error&) {
        s.usable = false;
      }
      return s;
    });

    for (const auto& s : batch) {
      ++report.samples;
      if (!s.usable) {
        ++report.rejected;
        continue;
      }
      const int a = s.counts.real_roots, b = s.counts.real_crit1, c = *s.counts.real_crit2;
      bool placed = false;
      for (std::size_t r = 0; r < report.rows.size(); ++r) {
        auto& row = report.rows[r];
        if (!row.matches(a, b, c)) continue;
        placed = true;
        ++row.hits;
        if (seen[r].size() < kKeep) seen[r].push_back(s.form);
        if (!row.found) {
          row.found = true;
          row.witness = s.form;
          row.source = s.source;
        }
      }
      if (!placed) {
        report.rows.push_back({a, b, c, false, false, true, s.form, s.source, 1});
        seen.push_back({s.form});
      }
    }
    report.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (!opt.exhaustive && report.all_expected_found()) break;
    if (report.seconds >= opt.seconds) {
      report.time_limited = start + n < opt.samples;
      break;
    }
  }
  return report;
}

}  // namespace bform
