#ifndef TRIPROD_SUITES_HPP
#define TRIPROD_SUITES_HPP

// Verification suites for the group model, orbits, the K-integral formula and
// single triple-product evaluations, all reported as IdentityReport.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "triprod/gamma.hpp"
#include "triprod/identities.hpp"
#include "triprod/lorentz.hpp"
#include "triprod/orbit.hpp"
#include "triprod/triple_product.hpp"

namespace triprod {

/// Three reports over `count` random elements of SO(d,1)^0: the form defect
/// |g^T J g - J|, the Iwasawa round-trip error |a n k - g| / max(1, |g|), and
/// |a_power(g, rho) - e^{rho t}| / |e^{rho t}| with t from the entry formula.
inline std::vector<IdentityReport> group_model_suite(int d, int count, std::uint64_t seed) {
  const Dimension dim(d);
  const auto& s = settings();
  Rng gen(seed);
  IdentityReport form{"metric preserved d=" + std::to_string(d), {}, {}, 0.0, s.group_tol, false, {}};
  IdentityReport trip{"iwasawa round-trip d=" + std::to_string(d), {}, {}, 0.0, s.roundtrip_tol, false, {}};
  IdentityReport entry{"a_power entry formula d=" + std::to_string(d), {}, {}, 0.0, 1e-10, false, {}};
  for (int i = 0; i < count; ++i) {
    const GroupElement g = random_element(dim, gen);
    const Matrix& m = g.matrix();
    const std::vector<cplx> params = {cplx(i, 0.0)};
    form.points.push_back({params, form_defect(m, dim), 0.0, form_defect(m, dim), {}});

    const auto f = iwasawa(g);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double rt = (reassemble(f, dim).matrix() - m).cwiseAbs().maxCoeff() / scale;
    trip.points.push_back({params, f.t, 0.0, rt, {}});

    const cplx ap = a_power(g, dim.rho());
    const double ref = std::exp(dim.rho() * a_coordinate_entry_formula(g));
    entry.points.push_back({params, ap, 0.0, std::abs(ap - ref) / ref, {}});
  }
  form.finish();
  trip.finish();
  entry.finish();
  return {form, trip, entry};
}

/// Open-orbit count (point 0, value = count, residual = |count - expected|)
/// followed by the AM tangent rank at `base_points` random X0 (residual =
/// |rank - (d-1)|).  Expected counts: 2 for d = 2, 1 for d >= 3.
inline IdentityReport orbit_suite(int d, std::uint64_t seed, int base_points = 20) {
  const Dimension dim(d);
  IdentityReport rep{"open orbits d=" + std::to_string(d), {}, {}, 0.0, 0.5, false, {}};
  const auto count = open_orbit_count(d, seed);
  const int expected = d == 2 ? 2 : 1;
  rep.points.push_back({{cplx(d, 0.0)}, double(count.open_orbit_count), 0.0,
                        std::abs(double(count.open_orbit_count - expected)), "open_orbit_count"});
  Rng gen(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < base_points; ++i) {
    Vector x0(d - 1);
    do {
      for (int j = 0; j < x0.size(); ++j) x0(j) = normal(gen);
    } while (x0.norm() < 1e-6);
    const int rank = am_tangent_rank(d, x0);
    rep.points.push_back({{cplx(i, 0.0)}, double(rank), 0.0, std::abs(double(rank - (d - 1))), "tangent rank"});
  }
  rep.finish();
  return rep;
}

/// K-integral transformation formula for `ys` random elements y, f(k) = k_11^2.
inline std::vector<IdentityReport> lemma12_suite(int d, int ys, std::int64_t samples, std::uint64_t seed) {
  const Dimension dim(d);
  Rng gen(seed);
  std::vector<IdentityReport> out;
  auto f = [](const Matrix& k) { return k(0, 0) * k(0, 0); };
  for (int i = 0; i < ys; ++i) {
    const GroupElement y = random_element(dim, gen);
    auto rep = lemma12_check(d, y, f, samples, seed + 1000003ULL * (i + 1));
    rep.identity_name += " y#" + std::to_string(i);
    out.push_back(std::move(rep));
  }
  return out;
}

/// One T_st evaluation; residual is the relative error estimate, passing when
/// the quadrature converged to `tol`.
inline IdentityReport triple_eval_suite(const SpectralTriple& st, double tol) {
  IdentityReport rep{"T_st d=" + std::to_string(st.dim.d()), {}, {}, 0.0, tol, false, {}};
  PointRecord rec{{st.lam, st.mu, st.nu}, {}, 0.0, 0.0, {}};
  try {
    const auto r = t_st_numeric(st, tol);
    rec.value = r.value;
    rec.abs_err = r.abs_err;
    rec.residual = r.abs_err / std::abs(r.value);
  } catch (const QuadratureError& e) {
    rec.value = e.best().value;
    rec.abs_err = e.best().abs_err;
    rec.residual = std::numeric_limits<double>::infinity();
    rec.note = e.what();
  }
  rep.points.push_back(rec);
  rep.max_residual = rec.residual;
  rep.pass = rec.note.empty() && rec.residual <= tol;
  return rep;
}

}  // namespace triprod

#endif  // TRIPROD_SUITES_HPP
