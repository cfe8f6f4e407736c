#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "triprod/quadrature.hpp"
#include "triprod/triple_product.hpp"

using namespace triprod;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Case {
  const char* name;
  std::function<cplx(double)> f;
  double lo, hi;
  cplx exact;
};

std::vector<Case> closed_form_cases() {
  return {
      {"const", [](double) { return cplx(1.0); }, 0.0, 1.0, 1.0},
      {"x^3", [](double x) { return cplx(x * x * x); }, -1.0, 2.0, 3.75},
      {"sin", [](double x) { return cplx(std::sin(x)); }, 0.0, kPi, 2.0},
      {"exp", [](double x) { return cplx(std::exp(x)); }, 0.0, 3.0, std::exp(3.0) - 1.0},
      {"lorentz", [](double x) { return cplx(1.0 / (1.0 + x * x)); }, -kInf, kInf, kPi},
      {"gauss", [](double x) { return cplx(std::exp(-x * x)); }, -kInf, kInf, std::sqrt(kPi)},
      {"halfgauss", [](double x) { return cplx(std::exp(-x * x)); }, 0.0, kInf, 0.5 * std::sqrt(kPi)},
      {"osc_decay", [](double t) { return std::exp(cplx(-1.0, 5.0) * t); }, 0.0, kInf, 1.0 / cplx(1.0, -5.0)},
      {"sqrt", [](double x) { return cplx(std::sqrt(x)); }, 0.0, 1.0, 2.0 / 3.0},
      {"log", [](double x) { return cplx(std::log(x)); }, 0.0, 1.0, -1.0},
      {"inv_sqrt", [](double x) { return cplx(1.0 / std::sqrt(x)); }, 0.0, 1.0, 2.0},
      {"cos_high", [](double x) { return cplx(std::cos(40.0 * x)); }, 0.0, 1.0, std::sin(40.0) / 40.0},
      {"x_exp", [](double x) { return cplx(x * std::exp(-x)); }, 0.0, kInf, 1.0},
      {"sech2", [](double x) { return cplx(1.0 / (std::cosh(x) * std::cosh(x))); }, -kInf, kInf, 2.0},
      {"lor4", [](double x) { return cplx(1.0 / std::pow(1.0 + x * x, 2)); }, 0.0, kInf, kPi / 4.0},
      {"peak", [](double x) { return cplx(1e-2 / (1e-4 + (x - 0.3) * (x - 0.3))); }, 0.0, 1.0,
       std::atan(70.0) + std::atan(30.0)},
      {"complex_pow", [](double x) { return std::pow(cplx(x), cplx(0.5, 2.0)); }, 0.0, 1.0, 1.0 / cplx(1.5, 2.0)},
      {"exp_neg", [](double x) { return cplx(std::exp(-3.0 * x)); }, -1.0, kInf, std::exp(3.0) / 3.0},
      {"abs", [](double x) { return cplx(std::abs(x)); }, -1.0, 1.0, 1.0},
      {"cos_gauss", [](double x) { return cplx(std::cos(3.0 * x) * std::exp(-x * x)); }, -kInf, kInf,
       std::sqrt(kPi) * std::exp(-2.25)},
  };
}

}  // namespace

TEST(Integrate1d, ClassicalExamples) {
  EXPECT_NEAR(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, 1e-10).value.real(), 1.0, 1e-14);
  const auto r = integrate_1d([](double x) { return 1.0 / (1.0 + x * x); }, -kInf, kInf, 1e-10);
  EXPECT_NEAR(r.value.real(), kPi, 1e-9);
  const auto o = integrate_1d([](double t) { return std::exp(cplx(-1.0, 5.0) * t); }, 0.0, kInf, 1e-10);
  EXPECT_LT(std::abs(o.value - 1.0 / cplx(1.0, -5.0)), 1e-10);
  EXPECT_GT(o.evals, 0);
}

TEST(Integrate1d, ErrorEstimateIsHonest) {
  const auto cases = closed_form_cases();
  ASSERT_EQ(cases.size(), 20u);
  for (const auto& c : cases) {
    for (double tol : {1e-6, 1e-10}) {
      const auto r = integrate_1d(c.f, c.lo, c.hi, tol);
      const double err = std::abs(r.value - c.exact);
      EXPECT_LE(err, std::max(tol * std::abs(c.exact), r.abs_err) * 10.0 + 1e-14 * std::abs(c.exact))
          << c.name << " tol=" << tol;
      EXPECT_LE(err, 10.0 * r.abs_err + 1e-14 * std::abs(c.exact)) << c.name << " tol=" << tol;
      EXPECT_GE(r.abs_err, 0.0);
    }
  }
}

TEST(Integrate1d, NonConvergenceCarriesEstimate) {
  try {
    (void)integrate_1d([](double x) { return std::sin(1.0 / x) / x; }, 0.0, 1.0, 1e-12, 20);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.best().value.real()));
    EXPECT_GT(e.best().evals, 0);
  }
  EXPECT_THROW(integrate_1d([](double) { return 1.0; }, 1.0, 0.0, 1e-6), DomainError);
  EXPECT_THROW(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, 0.0), DomainError);
}

TEST(IntegrateTriple, SeparableGaussians) {
  auto f = [](double t, double x, double r) { return std::exp(-t * t - 2.0 * x * x - 3.0 * r * r); };
  TruncationSpec trunc;
  trunc.t_max = 9.0;
  const auto res = integrate_triple(f, trunc, 1e-8);
  const double exact = std::sqrt(kPi) * std::sqrt(kPi / 2.0) * 0.5 * std::sqrt(kPi / 3.0);
  EXPECT_NEAR(res.value.real(), exact, 1e-8 * exact);
  EXPECT_LE(std::abs(res.value.real() - exact), 10.0 * res.abs_err + 1e-14);
}

TEST(IntegrateTriple, Linearity) {
  auto f = [](double t, double x, double r) { return std::exp(-t * t - x * x - r); };
  auto g = [](double t, double x, double r) { return cplx(0.0, 1.0) * std::exp(-std::abs(t) - x * x - r * r * (1.0 + x * x)); };
  TruncationSpec trunc;
  trunc.t_max = 40.0;
  const double tol = 1e-7;
  const cplx alpha(2.0, -1.0), beta(-0.5, 3.0);
  const auto fg = integrate_triple([&](double t, double x, double r) { return alpha * f(t, x, r) + beta * g(t, x, r); },
                                   trunc, tol);
  const auto rf = integrate_triple(f, trunc, tol), rg = integrate_triple(g, trunc, tol);
  const cplx lin = alpha * rf.value + beta * rg.value;
  EXPECT_LT(std::abs(fg.value - lin), 10.0 * tol * std::abs(lin));
}

TEST(IntegrateTriple, ReducedIntegrandAtOriginIsFinite) {
  // I_1(1/2, 1/2, 1/2): the class-one integrand at lam = mu = nu = 0, d = 2.
  // The integrand is positive, so a box value sits below the full integral
  // and approaches it as the box grows (t-tails decay like t^2 e^{-|t|/2}).
  const AbcParams p{0.5, 0.5, 0.5, 1};
  auto f = [&](double t, double x, double) { return integrand(p, t, x, 0.0); };
  TruncationSpec small, large;
  small.t_max = 8.0;
  large.t_max = 16.0;
  small.r_max = large.r_max = 1.0;  // r is a dummy variable for n = 1
  const auto rs = integrate_triple(f, small, 1e-5), rl = integrate_triple(f, large, 1e-5);
  const double full = 27.50074327208149131;  // reference value, 30-digit arithmetic
  ASSERT_TRUE(std::isfinite(rl.value.real()));
  EXPECT_LT(rs.value.real(), rl.value.real());
  EXPECT_LT(rl.value.real(), full);
  // Omitted mass shrinks like t_max^2 e^{-t_max/2} (the x-integral grows with |t|).
  EXPECT_LT(full - rl.value.real(), 1.2 * 4.0 * std::exp(-4.0) * (full - rs.value.real()));
}

TEST(IntegrateTriple, TruncationStability) {
  auto f = [](double t, double x, double r) { return std::exp(-0.5 * std::abs(t)) / ((1.0 + x * x) * (1.0 + r * r)); };
  const double tol = 1e-6;
  TruncationSpec a, b;
  a.t_max = 35.0;  // omitted mass 4 e^{-17.5} * pi^2 / 2 < tol / 10 relative
  b.t_max = 70.0;
  const auto ra = integrate_triple(f, a, tol), rb = integrate_triple(f, b, tol);
  EXPECT_LT(std::abs(ra.value - rb.value), tol * std::abs(rb.value));
  EXPECT_NEAR(rb.value.real(), 4.0 * kPi * kPi / 2.0, 4e-6 * kPi * kPi);
}

TEST(IntegrateTriple, RejectsBadTruncation) {
  TruncationSpec t;
  t.t_max = -1.0;
  EXPECT_THROW(integrate_triple([](double, double, double) { return 1.0; }, t, 1e-6), DomainError);
}

TEST(Haar, Orthogonal) {
  for (int d = 2; d <= 6; ++d) {
    const auto r = haar_sample_k(d, 100 + d);
    EXPECT_LT((r.transpose() * r - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
  EXPECT_EQ(haar_sample_k(3, 5), haar_sample_k(3, 5));
  EXPECT_THROW(haar_sample_k(1, 0), DomainError);
}

TEST(Haar, Moments) {
  for (int d : {2, 3, 5}) {
    const auto m1 = mc_integrate_k([](const Eigen::MatrixXd& k) { return k(0, 0); }, d, 100000, 42);
    EXPECT_LE(std::abs(m1.value), 3.0 * m1.abs_err) << d;
    const auto m2 = mc_integrate_k([](const Eigen::MatrixXd& k) { return k(0, 0) * k(0, 0); }, d, 100000, 43);
    EXPECT_LE(std::abs(m2.value - 1.0 / d), 3.0 * m2.abs_err) << d;
  }
}

TEST(Haar, ConstantAndDeterminism) {
  const auto one = mc_integrate_k([](const Eigen::MatrixXd&) { return 1.0; }, 3, 1000, 1);
  EXPECT_EQ(one.value, cplx(1.0));
  EXPECT_EQ(one.abs_err, 0.0);
  auto f = [](const Eigen::MatrixXd& k) { return k(1, 2) + k(0, 0) * k(2, 2); };
  const auto a = mc_integrate_k(f, 4, 5000, 77), b = mc_integrate_k(f, 4, 5000, 77);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.abs_err, b.abs_err);
}

TEST(Haar, RightInvarianceKolmogorovSmirnov) {
  // Traces of k and k R0 should share one distribution; two-sample KS at 1%.
  const int d = 3, n = 4000;
  const Eigen::MatrixXd r0 = haar_sample_k(d, 999);
  Rng gen(2024);
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) a[i] = haar_rotation(d, gen).trace();
  for (int i = 0; i < n; ++i) b[i] = (haar_rotation(d, gen) * r0).trace();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double dmax = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    dmax = std::max(dmax, std::abs(double(i) / n - double(j) / n));
  }
  EXPECT_LT(dmax, 1.628 * std::sqrt(2.0 / n));
}

TEST(Parallel, DeterministicAcrossThreadCounts) {
  // Chebyshev panel fits and batch quadrature combine results in index order.
  std::vector<double> out(64);
  detail::parallel_for(out.size(), [&](std::size_t i) { out[i] = std::sin(double(i)); }, true);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], std::sin(double(i)));
}
