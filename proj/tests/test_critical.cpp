#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "support.hpp"

using namespace bform;
using namespace bform::testing;

namespace {

using Eigen1 = std::vector<CriticalRank1>;

Eigen1 pairs_of(const EigenResult& r) {
  EXPECT_FALSE(is_circle(r));
  return is_circle(r) ? Eigen1{} : std::get<Eigen1>(r);
}

int total_multiplicity(const Eigen1& e) {
  int m = 0;
  for (const auto& p : e) m += p.multiplicity;
  return m;
}

// Plain evaluation of Σ p_i a^i b^(d-i).
double eval(const Poly& p, double a, double b) {
  const int d = static_cast<int>(p.size()) - 1;
  double s = 0.0;
  for (int i = 0; i <= d; ++i) s += p[i].real() * std::pow(a, i) * std::pow(b, d - i);
  return s;
}

// Real critical angles of θ ↦ f(cos θ, sin θ) on [0, π), located by sign
// changes of a centred difference on a fine grid and refined by bisection.
std::vector<double> critical_angles(const Poly& p, int grid = 20000) {
  const auto slope = [&](double t) {
    const double h = 1e-6;
    return (eval(p, std::cos(t + h), std::sin(t + h)) - eval(p, std::cos(t - h), std::sin(t - h))) / (2 * h);
  };
  std::vector<double> out;
  const double step = std::numbers::pi / grid;
  for (int i = 0; i < grid; ++i) {
    double lo = i * step, hi = lo + step;
    double flo = slope(lo), fhi = slope(hi);
    if (flo == 0.0) {
      out.push_back(lo);
      continue;
    }
    if (flo * fhi > 0.0) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = slope(mid);
      if (fm * flo > 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

double angle_gap(double s, double t) { return std::abs(std::sin(s - t)); }

// Eigenvalues of the symmetric matrix of c0 y² + c1 xy + c2 x².
std::pair<double, double> quadratic_eigenvalues(const RealForm& q) {
  const double a = q[2], b = 0.5 * q[1], c = q[0];
  const double mean = 0.5 * (a + c), rad = std::hypot(0.5 * (a - c), b);
  return {mean + rad, mean - rad};
}

double eigen_residual(const ComplexForm& f, const CriticalRank1& e) {
  const auto w = contract(f, e.v);
  return std::hypot(std::abs(w.a - e.lambda * e.v.a), std::abs(w.b - e.lambda * e.v.b));
}

const SearchBudget kSmallBudget{200, 100, 5};

}  // namespace

TEST(Eigen, ProductXY) {
  const auto e = pairs_of(eigen_pairs(RealForm({0, 1, 0})));
  ASSERT_EQ(e.size(), 2u);
  std::vector<double> lambdas{e[0].lambda.real(), e[1].lambda.real()};
  std::sort(lambdas.begin(), lambdas.end());
  EXPECT_NEAR(lambdas[0], -0.5, 1e-12);
  EXPECT_NEAR(lambdas[1], 0.5, 1e-12);
  for (const auto& p : e) {
    EXPECT_TRUE(p.is_real);
    EXPECT_NEAR(std::abs(p.v.a), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(std::abs(p.v.b), std::sqrt(0.5), 1e-12);
  }
}

TEST(Eigen, QuadraticsMatchSymmetricMatrices) {
  Gen gen(31);
  for (int t = 0; t < 200; ++t) {
    const auto q = gen.real_form(2);
    const auto [hi, lo] = quadratic_eigenvalues(q);
    const auto e = pairs_of(eigen_pairs(q));
    ASSERT_EQ(e.size(), 2u);
    std::vector<double> got{e[0].lambda.real(), e[1].lambda.real()};
    std::sort(got.begin(), got.end());
    EXPECT_NEAR(got[0], lo, 1e-10 * q.norm());
    EXPECT_NEAR(got[1], hi, 1e-10 * q.norm());
  }
}

TEST(Eigen, FermatQuartic) {
  const auto e = pairs_of(eigen_pairs(RealForm({1, 0, 0, 0, 1})));
  ASSERT_EQ(e.size(), 4u);
  const std::vector<double> expected{1.0, 1.0, 0.5, 0.5};
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(e[i].lambda.real(), expected[i], 1e-12);
    EXPECT_TRUE(e[i].is_real);
  }
  EXPECT_NEAR(std::abs(e[2].v.a), std::sqrt(0.5), 1e-12);
}

TEST(Eigen, CircleIsDegenerate) {
  for (int d = 2; d <= 10; d += 2) {
    const auto r = eigen_pairs((3.0 * circle_power(d)));
    ASSERT_TRUE(is_circle(r));
    const auto c = std::get<DegenerateCircle>(r);
    EXPECT_EQ(c.degree, d);
    EXPECT_NEAR(c.eigenvalue.real(), 3.0, 1e-12);
  }
  EXPECT_TRUE(singular_space(circle_power(4)).degenerate);
}

TEST(Eigen, Errors) {
  try {
    eigen_pairs(RealForm::zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroForm);
  }
  try {
    eigen_pairs(RealForm({2.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(EigenProperty, CountResidualAndMembership) {
  Gen gen(32);
  for (int t = 0; t < 400; ++t) {
    const int d = gen.integer(1, 14);
    const auto f = t % 4 == 3 ? gen.complex_form(d) : gen.real_form(d).complexified();
    const auto e = pairs_of(eigen_pairs(f));
    EXPECT_EQ(total_multiplicity(e), d);
    const auto h = singular_space(f);
    for (const auto& p : e) {
      if (p.isotropic) continue;
      EXPECT_LE(std::abs(p.v.a * p.v.a + p.v.b * p.v.b - 1.0), 1e-10);
      // Both checks are homogeneous in v; complex v can be long when it sits
      // near an isotropic direction.
      const double grow = std::pow(std::max(1.0, p.v.norm()), d);
      EXPECT_LE(eigen_residual(f, p), 1e-8 * f.norm() * grow) << "d=" << d;
      EXPECT_LE(std::abs(p.lambda - f(p.v.a, p.v.b)), 1e-10 * f.norm() * grow);
      EXPECT_LE(h.membership(p.tensor(d)), 1e-8);
    }
  }
}

TEST(EigenProperty, RealEigenvectorsAreCriticalAngles) {
  Gen gen(33);
  for (int t = 0; t < 60; ++t) {
    const int d = gen.integer(2, 6);
    const auto f = gen.real_form(d);
    const auto e = pairs_of(eigen_pairs(f));
    std::vector<double> found;
    for (const auto& p : e)
      if (p.is_real) found.push_back(std::atan2(p.v.b.real(), p.v.a.real()));
    const auto oracle = critical_angles(to_poly(f));
    for (double a : oracle) {
      double best = 1.0;
      for (double b : found) best = std::min(best, angle_gap(a, b));
      EXPECT_LE(best, 1e-6) << "d=" << d;
    }
    EXPECT_GE(found.size(), oracle.size());
    EXPECT_EQ(found.size() % 2, oracle.size() % 2);
  }
}

TEST(Certificate, ForwardConstructedInstancesCertify) {
  Gen gen(34);
  for (int t = 0; t < 200; ++t) {
    const int d = gen.integer(2, 10);
    const int k = gen.integer(1, d / 2);
    std::vector<Summand<double>> s;
    for (int i = 0; i < k; ++i) s.push_back({gen.normal(), gen.unit_linear()});
    const auto h = gen.real_form(d - 2 * k);
    auto q = RealForm({1.0});
    for (const auto& x : s) q = q * as_form(perp(x.l)) * as_form(perp(x.l));
    auto f = h * q;
    for (const auto& x : s) f += x.mu * power(x.l, d);
    bool separated = true;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) separated = separated && projective_distance(s[i].l, s[j].l) > 1e-3;
    if (!separated) continue;
    const auto c = certify(f, s);
    EXPECT_LE(c.residual, 1e-10) << "d=" << d << " k=" << k;
    EXPECT_LE((c.cofactor - h).norm(), 1e-6 * std::max(1.0, h.norm()));
  }
}

TEST(Certificate, PerturbedWeightFails) {
  Gen gen(44);
  for (int t = 0; t < 100; ++t) {
    const int d = gen.integer(2, 10);
    const int k = gen.integer(1, d / 2);
    std::vector<Summand<double>> s;
    for (int i = 0; i < k; ++i) s.push_back({gen.normal(), gen.unit_linear()});
    bool separated = true;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) separated = separated && projective_distance(s[i].l, s[j].l) > 1e-2;
    if (!separated) continue;
    auto q = RealForm({1.0});
    for (const auto& x : s) q = q * as_form(perp(x.l)) * as_form(perp(x.l));
    auto f = gen.real_form(d - 2 * k) * q;
    for (const auto& x : s) f += x.mu * power(x.l, d);
    s[0].mu += 1e-3;
    EXPECT_GT(certify(f, s).residual, 1e-6 / std::max(1.0, f.norm())) << "d=" << d << " k=" << k;
  }
}

TEST(Certificate, RandomPointsFail) {
  Gen gen(35);
  for (int t = 0; t < 200; ++t) {
    const int d = gen.integer(2, 10);
    const int k = gen.integer(1, d / 2);
    const auto f = gen.real_form(d);
    std::vector<Summand<double>> s;
    for (int i = 0; i < k; ++i) s.push_back({gen.normal(), gen.unit_linear()});
    EXPECT_GE(certify(f, s).residual, 1e-4) << "d=" << d << " k=" << k;
  }
}

TEST(Certificate, EigenvectorsCertifyAtRankOne) {
  Gen gen(36);
  for (int t = 0; t < 50; ++t) {
    const auto f = gen.real_form(gen.integer(2, 9));
    for (const auto& p : pairs_of(eigen_pairs(f))) {
      if (!p.is_real) continue;
      const std::vector<Summand<double>> s{{p.lambda.real(), {p.v.a.real(), p.v.b.real()}}};
      EXPECT_LE(certify(f, s).residual, 1e-10);
    }
  }
}

TEST(Certificate, Errors) {
  const RealForm f({1, 2, 3, 4, 5});
  const std::vector<Summand<double>> same{{1.0, {1.0, 0.0}}, {2.0, {-1.0, 0.0}}};
  try {
    certify(f, same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CollapsedDirections);
  }
  const std::vector<Summand<double>> three{{1.0, {1.0, 0.0}}, {1.0, {0.0, 1.0}}, {1.0, {1.0, 1.0}}};
  try {
    certify(f, three);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(CriticalRankK, WorkedQuartic) {
  const RealForm f({2, 0, 0, 1, 0});  // x³y + 2y⁴
  const auto s = critical_rank_k(f, 2, Field::Complex);
  EXPECT_FALSE(s.budget_exhausted);
  EXPECT_EQ(s.honest_count(), 6);
  ASSERT_EQ(s.boundary_count(), 1);
  const auto& b = s.points.back();
  ASSERT_TRUE(b.boundary);
  const auto target = RealForm({0, 0, 0, 1, 0}).complexified();
  EXPECT_LE((b.tensor - target).norm() / target.norm(), 1e-6);
  const auto h = singular_space(f);
  for (const auto& p : s.points) {
    EXPECT_LE(h.membership(p.tensor), 1e-8);
    EXPECT_LE(p.grad_residual, 1e-8 * f.norm());
    EXPECT_LE(p.cert_residual, 1e-8);
  }
}

TEST(CriticalRankK, FermatQuarticIsItsOwnRankTwoPoint) {
  const RealForm f({1, 0, 0, 0, 1});
  const auto s = critical_rank_k(f, 2, Field::Complex);
  const bool exact = std::any_of(s.points.begin(), s.points.end(), [](const auto& p) { return p.distance <= 1e-10; });
  EXPECT_TRUE(exact);
}

TEST(CriticalRankK, HonestPointsCertifyIndependently) {
  Gen gen(37);
  for (int t = 0; t < 6; ++t) {
    const int d = gen.integer(4, 7);
    const auto f = gen.real_form(d);
    const auto s = critical_rank_k(f, 2, Field::Complex, kSmallBudget);
    EXPECT_FALSE(s.points.empty());
    const auto h = singular_space(f);
    for (const auto& p : s.points) {
      EXPECT_LE(h.membership(p.tensor), 1e-8);
      if (p.boundary) continue;
      EXPECT_LE(certify(f.complexified(), p.summands).residual, 1e-8) << "d=" << d;
      EXPECT_LE((sum_of_powers(std::span<const Summand<cplx>>(p.summands), d) - p.tensor).norm(), 1e-12 * f.norm());
    }
  }
}

TEST(CriticalRankK, QuarticsReachSevenOrSayExhausted) {
  Gen gen(38);
  for (int t = 0; t < 8; ++t) {
    const auto f = gen.real_form(4);
    const auto s = critical_rank_k(f, 2, Field::Complex, SearchBudget{0, 100, static_cast<std::uint64_t>(t)});
    if (s.points.size() != 7u) EXPECT_TRUE(s.budget_exhausted);
    EXPECT_LE(s.points.size(), 7u);
  }
}

TEST(CriticalRankK, RealSearchGivesRealTensors) {
  Gen gen(39);
  for (int t = 0; t < 5; ++t) {
    const auto f = gen.real_form(gen.integer(4, 6));
    const auto s = critical_rank_k(f, 2, Field::Real, kSmallBudget);
    for (const auto& p : s.points) {
      EXPECT_TRUE(p.is_real);
      EXPECT_LE(imaginary_ratio(p.tensor), 1e-9);
    }
  }
}

TEST(CriticalRankK, RankOneAgreesWithEigenpairs) {
  Gen gen(40);
  for (int t = 0; t < 10; ++t) {
    const auto f = gen.real_form(gen.integer(2, 6));
    const auto s = critical_rank_k(f, 1, Field::Real, kSmallBudget);
    const auto e = pairs_of(eigen_pairs(f));
    for (const auto& p : s.points) {
      bool matched = false;
      for (const auto& q : e)
        if (q.is_real && (p.tensor - q.tensor(f.degree())).norm() <= 1e-8 * f.norm()) matched = true;
      EXPECT_TRUE(matched);
    }
  }
}

TEST(CriticalRankK, Errors) {
  const auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Parse;
  };
  EXPECT_EQ(code([] { critical_rank_k(RealForm::zero(4), 2, Field::Complex); }), ErrorCode::ZeroForm);
  EXPECT_EQ(code([] { critical_rank_k(RealForm({1, 2, 3, 4, 5}), 3, Field::Complex); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { critical_rank_k(RealForm({1, 2, 3, 4, 5}), 0, Field::Complex); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { critical_rank_k(circle_power(4), 2, Field::Complex); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code([] { critical_rank_k(ComplexForm({1, 2, cplx(0, 1), 4, 5}), 2, Field::Real); }),
            ErrorCode::InvalidArgument);
}

TEST(BestRankK, ExactPower) {
  const auto p = best_rank_k(RealForm({0, 0, 0, 0, 2}), 1, kSmallBudget);
  EXPECT_LE(p.distance, 1e-10);
  EXPECT_LE((p.tensor - RealForm({0, 0, 0, 0, 2}).complexified()).norm(), 1e-10);
}

TEST(BestRankK, FermatQuartic) {
  const RealForm f({1, 0, 0, 0, 1});
  EXPECT_NEAR(best_rank_k(f, 1, kSmallBudget).distance, 1.0, 1e-10);
  EXPECT_LE(best_rank_k(f, 2, kSmallBudget).distance, 1e-10);
}

TEST(BestRankK, TruncatedSpectrumForQuadratics) {
  Gen gen(41);
  for (int t = 0; t < 50; ++t) {
    const auto q = gen.real_form(2);
    const auto [hi, lo] = quadratic_eigenvalues(q);
    EXPECT_NEAR(best_rank_k(q, 1, kSmallBudget).distance, std::min(std::abs(hi), std::abs(lo)), 1e-9 * q.norm());
  }
}

// ‖f - λ v^d‖² = ‖f‖² - λ² at a critical point, so the best rank-one distance
// follows from the largest |f| on the unit circle.
TEST(BestRankK, RankOneMatchesAngleGrid) {
  Gen gen(42);
  for (int t = 0; t < 40; ++t) {
    const int d = gen.integer(2, 6);
    const auto f = gen.real_form(d);
    const auto p = to_poly(f);
    double peak = 0.0;
    for (double a : critical_angles(p)) peak = std::max(peak, std::abs(eval(p, std::cos(a), std::sin(a))));
    const double expected = std::sqrt(std::max(0.0, f.norm2() - peak * peak));
    EXPECT_NEAR(best_rank_k(f, 1, kSmallBudget).distance, expected, 1e-7 * f.norm()) << "d=" << d;
  }
}

// The best rank-one term is the spectral term of largest |λ|.
TEST(BestRankK, RankOnePicksTheLargestEigenvalue) {
  Gen gen(45);
  for (int t = 0; t < 50; ++t) {
    const auto q = gen.real_form(2);
    const auto e = pairs_of(eigen_pairs(q));
    ASSERT_EQ(e.size(), 2u);
    if (std::abs(std::abs(e[0].lambda) - std::abs(e[1].lambda)) < 1e-6) continue;
    const auto p = best_rank_k(q, 1, kSmallBudget);
    EXPECT_LE((p.tensor - e[0].tensor(2)).norm(), 1e-9 * q.norm());
  }
}

TEST(BestRankK, NoRealPointIsAnError) {
  try {
    best_rank_k(circle_power(4), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
  }
}

namespace {

template <class Chart, class Vec, class Mat>
double jacobian_error(const Chart& chart, const Vec& x) {
  Vec F, Fp, Fm;
  Mat J;
  chart.evaluate(x, F, &J);
  Mat fd(J.rows(), J.cols());
  const double h = 1e-6;
  for (int c = 0; c < x.size(); ++c) {
    Vec xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    chart.evaluate(xp, Fp, nullptr);
    chart.evaluate(xm, Fm, nullptr);
    fd.col(c) = (Fp - Fm) / (2 * h);
  }
  return (fd - J).norm() / std::max(1.0, J.norm());
}

}  // namespace

TEST(Charts, JacobiansMatchFiniteDifferences) {
  Gen gen(43);
  for (int t = 0; t < 20; ++t) {
    const int d = gen.integer(4, 8);
    const int k = gen.integer(2, d / 2);
    const auto fr = gen.real_form(d);
    const auto fc = gen.complex_form(d);

    detail::VecR xr(2 * k);
    detail::VecC xc(2 * k);
    for (int i = 0; i < 2 * k; ++i) {
      xr(i) = gen.normal();
      xc(i) = 0.5 * gen.complex_normal();
    }
    EXPECT_LE((jacobian_error<detail::AngleChart<double>, detail::VecR, detail::MatR>(
                  detail::AngleChart<double>(d, k, fr), xr)),
              1e-6);
    EXPECT_LE((jacobian_error<detail::AngleChart<cplx>, detail::VecC, detail::MatC>(
                  detail::AngleChart<cplx>(d, k, fc), xc)),
              1e-6);
    EXPECT_LE((jacobian_error<detail::ComplexChart, detail::VecC, detail::MatC>(detail::ComplexChart{d, k, fc}, xc)),
              1e-6);

    detail::VecR tr(3 + 2 * (k - 2));
    detail::VecC tc(3 + 2 * (k - 2));
    for (int i = 0; i < tr.size(); ++i) {
      tr(i) = gen.normal();
      tc(i) = 0.5 * gen.complex_normal();
    }
    EXPECT_LE((jacobian_error<detail::TangentialChart<double>, detail::VecR, detail::MatR>(
                  detail::TangentialChart<double>{d, k, fr}, tr)),
              1e-6);
    EXPECT_LE((jacobian_error<detail::TangentialChart<cplx>, detail::VecC, detail::MatC>(
                  detail::TangentialChart<cplx>{d, k, fc}, tc)),
              1e-6);
  }
}
