#ifndef TRIPROD_IDENTITIES_HPP
#define TRIPROD_IDENTITIES_HPP

// Identity suites built on the triple-product integrals: the recursion ladder,
// closed-form ratio constancy, the large-lambda asymptotic, and the Monte Carlo
// check of the K-integral transformation formula.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "triprod/gamma.hpp"
#include "triprod/lorentz.hpp"
#include "triprod/quadrature.hpp"
#include "triprod/triple_product.hpp"

namespace triprod {

/// One evaluated point of a suite.
struct PointRecord {
  std::vector<cplx> params;
  cplx value{0.0, 0.0};
  double abs_err = 0.0;
  double residual = 0.0;
  std::string note;  // set for skipped points
};

struct IdentityReport {
  std::string identity_name;
  std::vector<PointRecord> points;
  std::vector<PointRecord> skipped;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::optional<cplx> constant;  // fitted constant, where the suite has one

  void finish() {
    max_residual = 0.0;
    for (const auto& p : points)
      max_residual = std::isnan(p.residual) ? p.residual : std::max(max_residual, p.residual);  // NaN sticks, fails
    pass = !points.empty() && max_residual < tolerance;
  }
};

inline double relative_residual(cplx lhs, cplx rhs) {
  const double den = std::abs(lhs) + std::abs(rhs);
  return den > 0.0 ? std::abs(lhs - rhs) / den : 0.0;
}

namespace detail {

// Memoized I_n / I_n' evaluations: requests are collected, then evaluated
// once each in key order.
class IntegralTable {
 public:
  using Key = std::tuple<int, int, double, double, double, double, double, double>;

  explicit IntegralTable(double tol) : tol_(tol) {}

  static Key key(int n, int xp, cplx a, cplx b, cplx c) {
    return {n, xp, a.real(), a.imag(), b.real(), b.imag(), c.real(), c.imag()};
  }

  // Registers a request; returns false if the integral does not converge.
  bool want(int n, int xp, cplx a, cplx b, cplx c) {
    if (!convergence({a, b, c, n}, xp).ok) return false;
    results_.try_emplace(key(n, xp, a, b, c));
    return true;
  }

  void evaluate() {
    std::vector<Key> todo;
    for (const auto& [k, v] : results_)
      if (!v.done) todo.push_back(k);
    for (const Key& k : todo) {
      const auto [n, xp, ar, ai, br, bi, cr, ci] = k;
      TripleOptions opt;
      opt.tol = tol_;
      opt.x_power = xp;
      Entry& e = results_.at(k);
      try {
        e.quad = evaluate_reduced({cplx(ar, ai), cplx(br, bi), cplx(cr, ci), n}, opt).quad;
      } catch (const QuadratureError& err) {
        e.quad = err.best();
        e.failure = err.what();
      }
      e.done = true;
    }
  }

  const QuadResult& get(int n, int xp, cplx a, cplx b, cplx c) const { return entry(n, xp, a, b, c).quad; }
  const std::string& failure(int n, int xp, cplx a, cplx b, cplx c) const {
    return entry(n, xp, a, b, c).failure;
  }

 private:
  struct Entry {
    QuadResult quad;
    std::string failure;
    bool done = false;
  };
  const Entry& entry(int n, int xp, cplx a, cplx b, cplx c) const {
    auto it = results_.find(key(n, xp, a, b, c));
    if (it == results_.end() || !it->second.done) throw Error("IntegralTable: value was not requested");
    return it->second;
  }

  double tol_;
  std::map<Key, Entry> results_;
};

// One side of an identity: sum of coefficient * integral.
struct Term {
  cplx coef;
  int n, xp;
  cplx a, b, c;
};

struct IdentitySpec {
  std::string name;
  std::function<std::pair<std::vector<Term>, std::vector<Term>>(const AbcParams&)> sides;
  bool skip_if_singular_coef = true;
};

}  // namespace detail

/// Parameter points for the recursion suites; every identity of the suite for
/// n has all of its shifted integrals convergent at at least five of them.
inline std::vector<AbcParams> default_recursion_points(int n) {
  const std::vector<std::array<double, 3>> base = {
      {1.5, 1.5, 1.2}, {2.0, 2.0, 1.5}, {1.7, 2.3, 1.6}, {2.5, 2.0, 2.0}, {2.2, 2.6, 1.9}, {3.0, 2.5, 2.4}};
  std::vector<AbcParams> pts;
  for (const auto& b : base) pts.push_back({b[0] + 0.5 * (n - 1), b[1] + 0.5 * (n - 1), b[2] + 0.5 * (n - 1), n});
  return pts;
}

/// Identity reports for dimension n: for n = 1 the integration-by-parts
/// relation to I_3, the reflection relation for I', its consequence for I',
/// the step relation to I_3, and the T_st ladder; for n > 1 the corresponding
/// relations to I_{n+2}.  Points where a shifted integral diverges, or an
/// identity coefficient is singular, are skipped and recorded.
inline std::vector<IdentityReport> recursion_suite(int n, const std::vector<AbcParams>& points, double tol,
                                                   double suite_tol = 1e-4) {
  if (n < 1) throw DomainError("recursion_suite: n must be >= 1");
  using detail::Term;
  std::vector<detail::IdentitySpec> specs;
  const double nd = n;
  if (n > 1) {
    specs.push_back({"ibp_r (n>1)", [=](const AbcParams& p) {
                       return std::pair{std::vector<Term>{{1.0, n, 0, p.a, p.b, p.c}},
                                        std::vector<Term>{{2.0 * p.a / (nd - 1.0), n + 2, 0, p.a + 1.0, p.b, p.c + 1.0},
                                                          {2.0 * p.b / (nd - 1.0), n + 2, 0, p.a, p.b + 1.0, p.c + 1.0}}};
                     }});
  } else {
    specs.push_back({"ibp_r (n=1)", [=](const AbcParams& p) {
                       return std::pair{std::vector<Term>{{1.0, 1, 0, p.a, p.b, p.c}},
                                        std::vector<Term>{{2.0 * p.a, 3, 0, p.a + 1.0, p.b, p.c + 1.0},
                                                          {2.0 * p.b, 3, 0, p.a, p.b + 1.0, p.c + 1.0}}};
                     }});
  }
  specs.push_back({"reflection I'", [=](const AbcParams& p) {
                     return std::pair{std::vector<Term>{{1.0, n, 1, p.a, p.b, p.c}},
                                      std::vector<Term>{{-1.0, n, 1, p.b, p.a, p.c}, {-1.0, n, 0, p.b, p.a, p.c - 1.0}}};
                   }});
  specs.push_back({"I' reduction", [=](const AbcParams& p) {
                     const cplx x = p.a, y = p.b, z = p.c;
                     return std::pair{std::vector<Term>{{1.0, n, 1, x, y, z}},
                                      std::vector<Term>{{(z - x - y + 1.0) / (2.0 * y - 2.0), n, 0, y - 1.0, x, z}}};
                   }});
  specs.push_back({n > 1 ? "step n->n+2 (n>1)" : "step 1->3", [=](const AbcParams& p) {
                     const cplx k = (p.a + p.b - p.c - 1.0) / (4.0 * p.a * p.b) * (n > 1 ? nd - 1.0 : 1.0);
                     return std::pair{std::vector<Term>{{1.0, n + 2, 0, p.a + 1.0, p.b + 1.0, p.c + 1.0}},
                                      std::vector<Term>{{k, n, 0, p.a, p.b, p.c + 1.0}}};
                   }});
  specs.push_back({"T_st ladder", [=](const AbcParams& p) {
                     // (a, b, c) read as shifted spectral parameters of dimension n.
                     const cplx lam = p.a - 0.5 * nd, mu = p.b - 0.5 * nd, nu = p.c - 0.5 * nd;
                     const double dn = n > 1 ? (nd - 1.0) * c_n(n + 2) / c_n(n) : c_n(3);
                     const cplx k = dn * (lam + mu - nu + 0.5 * nd - 1.0) / ((2.0 * lam + nd) * (2.0 * mu + nd));
                     const double h2 = 0.5 * (nd + 2.0), h = 0.5 * nd;
                     return std::pair{std::vector<Term>{{c_n(n + 2), n + 2, 0, lam + h2, mu + h2, nu + h2}},
                                      std::vector<Term>{{k * c_n(n), n, 0, lam + h, mu + h, nu + 1.0 + h}}};
                   }});

  detail::IntegralTable table(tol);
  struct Plan {
    std::size_t spec, point;
    std::vector<Term> lhs, rhs;
    std::string skip;
  };
  std::vector<Plan> plans;
  for (std::size_t s = 0; s < specs.size(); ++s)
    for (std::size_t i = 0; i < points.size(); ++i) {
      Plan pl{s, i, {}, {}, {}};
      if (points[i].n != n) {
        pl.skip = "point dimension differs from suite dimension";
        plans.push_back(std::move(pl));
        continue;
      }
      std::tie(pl.lhs, pl.rhs) = specs[s].sides(points[i]);
      for (const auto* side : {&pl.lhs, &pl.rhs})
        for (const auto& t : *side) {
          if (!std::isfinite(std::abs(t.coef))) pl.skip = "singular identity coefficient";
          if (!convergence({t.a, t.b, t.c, t.n}, t.xp).ok) pl.skip = "divergent shifted integral";
        }
      if (pl.skip.empty())
        for (const auto* side : {&pl.lhs, &pl.rhs})
          for (const auto& t : *side) table.want(t.n, t.xp, t.a, t.b, t.c);
      plans.push_back(std::move(pl));
    }
  table.evaluate();

  std::vector<IdentityReport> reports(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    reports[s].identity_name = specs[s].name;
    reports[s].tolerance = suite_tol;
  }
  for (const auto& pl : plans) {
    const AbcParams& p = points[pl.point];
    PointRecord rec{{p.a, p.b, p.c}, {}, 0.0, 0.0, pl.skip};
    if (!pl.skip.empty()) {
      reports[pl.spec].skipped.push_back(rec);
      continue;
    }
    cplx lhs = 0.0, rhs = 0.0;
    double err = 0.0;
    std::string failure;
    auto add = [&](const std::vector<Term>& side, cplx& acc) {
      for (const auto& t : side) {
        const auto& q = table.get(t.n, t.xp, t.a, t.b, t.c);
        acc += t.coef * q.value;
        err += std::abs(t.coef) * q.abs_err;
        const auto& f = table.failure(t.n, t.xp, t.a, t.b, t.c);
        if (!f.empty()) failure = f;
      }
    };
    add(pl.lhs, lhs);
    add(pl.rhs, rhs);
    rec.value = lhs;
    rec.abs_err = err;
    rec.residual = relative_residual(lhs, rhs);
    if (!failure.empty()) {
      rec.note = failure;
      rec.residual = std::max(rec.residual, 1.0);
    }
    reports[pl.spec].points.push_back(rec);
  }
  for (auto& r : reports) r.finish();
  return reports;
}

/// Ratio constancy of t_st_numeric / gamma_ratio over a list of points of one
/// dimension.  The constant is the least-squares fit (mean of the ratios).
inline IdentityReport t_st_closed_ratio_test(const std::vector<SpectralTriple>& st_list, double tol,
                                             double quad_tol = 1e-5) {
  if (st_list.empty()) throw DomainError("t_st_closed_ratio_test: empty point list");
  for (const auto& st : st_list)
    if (!(st.dim == st_list.front().dim)) throw DomainError("t_st_closed_ratio_test: points must share d");
  IdentityReport rep;
  rep.identity_name = "closed-form ratio d=" + std::to_string(st_list.front().dim.d());
  rep.tolerance = tol;

  std::vector<cplx> ratios(st_list.size());
  std::vector<QuadResult> num(st_list.size());
  std::vector<std::string> failure(st_list.size());
  std::vector<cplx> closed(st_list.size());
  for (std::size_t i = 0; i < st_list.size(); ++i) {
    closed[i] = gamma_ratio(st_list[i]);
    if (!(std::abs(closed[i]) > 1e-300)) throw DomainError("t_st_closed_ratio_test: closed form vanishes");
  }
  // Points run one after another; each integral fans out over the pool.
  for (std::size_t i = 0; i < st_list.size(); ++i) {
    try {
      num[i] = t_st_numeric(st_list[i], quad_tol);
    } catch (const QuadratureError& e) {
      num[i] = e.best();
      failure[i] = e.what();
    }
  }
  cplx mean = 0.0;
  for (std::size_t i = 0; i < st_list.size(); ++i) {
    ratios[i] = num[i].value / closed[i];
    mean += ratios[i];
  }
  mean /= static_cast<double>(st_list.size());
  rep.constant = mean;
  bool unitary = true;
  for (std::size_t i = 0; i < st_list.size(); ++i) {
    const auto& st = st_list[i];
    unitary = unitary && st.on_unitary_axis();
    PointRecord rec{{st.lam, st.mu, st.nu}, ratios[i], num[i].abs_err / std::abs(closed[i]),
                    std::abs(ratios[i] - mean) / std::abs(mean), failure[i]};
    if (!failure[i].empty()) rec.residual = std::max(rec.residual, 1.0);
    rep.points.push_back(rec);
  }
  rep.finish();
  if (unitary && !(mean.real() > 0.0 && std::abs(mean.imag()) <= tol * std::abs(mean))) rep.pass = false;
  return rep;
}

/// Result of the large-lambda check.
struct AsymptoticReport {
  IdentityReport slope;   // residual j: |E(t_{j+1}) - E(t_j)|
  IdentityReport closed;  // residual j: |E_num - E_closed - K|
};

/// E(t) = log|T_st(it, mu, nu)| + (pi/2) t - (d/2 - 2) log t.
inline double asymptotic_correction(double log_abs, double t, Dimension dim) {
  return log_abs + 0.5 * std::numbers::pi * t - (0.5 * dim.d() - 2.0) * std::log(t);
}

/// Successive differences of E must shrink by at least `ratio` per step, up to
/// the quadrature error of E; the numeric E
/// must match the closed-form E after fitting one constant within closed_tol.
inline AsymptoticReport asymptotic_slope_test(int d, cplx mu, cplx nu, const std::vector<double>& t_values,
                                              double quad_tol, double ratio = 0.7, double closed_tol = 1e-6) {
  const Dimension dim(d);
  if (t_values.size() < 3) throw DomainError("asymptotic_slope_test: need at least 3 t values");
  for (std::size_t i = 0; i + 1 < t_values.size(); ++i)
    if (!(t_values[i + 1] > t_values[i]) || !(t_values[i] > 0.0))
      throw DomainError("asymptotic_slope_test: t values must be positive and increasing");
  const std::size_t m = t_values.size();
  std::vector<QuadResult> num(m);
  std::vector<std::string> failure(m);
  for (std::size_t i = 0; i < m; ++i) {
    try {
      num[i] = t_st_numeric(SpectralTriple(cplx(0.0, t_values[i]), mu, nu, dim), quad_tol);
    } catch (const QuadratureError& e) {
      num[i] = e.best();
      failure[i] = e.what();
    }
  }
  std::vector<double> e_num(m), e_closed(m), e_err(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = t_values[i];
    e_num[i] = asymptotic_correction(std::log(std::abs(num[i].value)), t, dim);
    e_err[i] = num[i].abs_err / std::abs(num[i].value);
    e_closed[i] = asymptotic_correction(log_gamma_ratio(SpectralTriple(cplx(0.0, t), mu, nu, dim)).real(), t, dim);
  }

  AsymptoticReport rep;
  rep.slope.identity_name = "asymptotic correction d=" + std::to_string(d);
  rep.slope.tolerance = ratio;
  bool ok = true;
  std::vector<double> diff(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    diff[i] = std::abs(e_num[i + 1] - e_num[i]);
    PointRecord rec{{cplx(0.0, t_values[i]), cplx(0.0, t_values[i + 1])}, e_num[i + 1] - e_num[i],
                    e_err[i] + e_err[i + 1], diff[i], failure[i + 1]};
    if (i > 0) {
      rec.residual = diff[i - 1] > 0.0 ? diff[i] / diff[i - 1] : 0.0;
      const double slack = e_err[i - 1] + 2.0 * e_err[i] + e_err[i + 1];
      if (diff[i] > ratio * diff[i - 1] + slack) ok = false;
    } else {
      rec.residual = 0.0;
    }
    if (!failure[i].empty() || !failure[i + 1].empty()) ok = false;
    rep.slope.points.push_back(rec);
  }
  rep.slope.finish();
  rep.slope.pass = ok;

  rep.closed.identity_name = "asymptotic closed-form d=" + std::to_string(d);
  rep.closed.tolerance = closed_tol;
  double k = 0.0;
  for (std::size_t i = 0; i < m; ++i) k += e_num[i] - e_closed[i];
  k /= static_cast<double>(m);
  rep.closed.constant = std::exp(k);
  for (std::size_t i = 0; i < m; ++i)
    rep.closed.points.push_back({{cplx(0.0, t_values[i]), mu, nu}, e_num[i], e_err[i],
                                 std::abs(e_num[i] - e_closed[i] - k), failure[i]});
  rep.closed.finish();
  if (std::any_of(failure.begin(), failure.end(), [](const std::string& f) { return !f.empty(); }))
    rep.closed.pass = false;
  return rep;
}

/// Monte Carlo check of int f(k) dk = int a(ky)^{2 rho} f(k^y) dk and of the
/// inverse form int f(k^y) dk = int a(k y^{-1})^{2 rho} f(k) dk, both sides on
/// one sample stream.  Residual = |LHS - RHS| / (combined standard error);
/// pass if every residual is at most `sigmas`.
inline IdentityReport lemma12_check(int d, const GroupElement& y, const std::function<double(const Matrix&)>& f,
                                    std::int64_t samples, std::uint64_t seed, double sigmas = 3.0) {
  if (y.dim().d() != d) throw DomainError("lemma12_check: y does not belong to SO(d,1)");
  const Dimension dim = y.dim();
  const double two_rho = 2.0 * dim.rho();
  const GroupElement y_inv = y.inverse();
  IdentityReport rep;
  rep.identity_name = "K-integral transformation d=" + std::to_string(d);
  rep.tolerance = sigmas;

  auto add = [&](const QuadResult& lhs, const QuadResult& rhs, const std::string& form) {
    const double se = std::hypot(lhs.abs_err, rhs.abs_err);
    const double diff = std::abs(lhs.value - rhs.value);
    PointRecord rec{{lhs.value, rhs.value}, lhs.value - rhs.value, se, 0.0, form};
    rec.residual = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    rep.points.push_back(rec);
  };

  const auto lhs = mc_integrate_k([&](const Matrix& k) { return cplx(f(k)); }, d, samples, seed);
  const auto rhs = mc_integrate_k(
      [&](const Matrix& k) {
        const GroupElement ky = embed_k(k, dim) * y;
        return cplx(std::exp(two_rho * detail::a_coordinate(ky.matrix(), d)) * f(iwasawa(ky).k));
      },
      d, samples, seed);
  add(lhs, rhs, "forward");

  const auto lhs2 = mc_integrate_k([&](const Matrix& k) { return cplx(f(k_action(k, y))); }, d, samples, seed);
  const auto rhs2 = mc_integrate_k(
      [&](const Matrix& k) {
        const GroupElement ky = embed_k(k, dim) * y_inv;
        return cplx(std::exp(two_rho * detail::a_coordinate(ky.matrix(), d)) * f(k));
      },
      d, samples, seed);
  add(lhs2, rhs2, "inverse");
  rep.max_residual = std::max(rep.points[0].residual, rep.points[1].residual);
  rep.pass = rep.max_residual <= sigmas;
  return rep;
}

}  // namespace triprod

#endif  // TRIPROD_IDENTITIES_HPP
