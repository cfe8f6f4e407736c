#ifndef TRIPROD_TRIPLE_PRODUCT_HPP
#define TRIPROD_TRIPLE_PRODUCT_HPP

// Reduced triple-product integrals
//
//   I_n(a,b,c) = int_R dt int_R dx int_0^inf dr  r^{n-2} e^{t(c-a-b)}
//                (1 + (e^{-t}+x)^2 + r^2)^{-a} (1 + x^2 + r^2)^{-b}
//
// (no r-integral for n = 1), the variant I_n' with an extra factor x, and
// T_st(lam,mu,nu) = c_n I_n(lam+n/2, mu+n/2, nu+n/2).
//
// Evaluation.  With u = e^{-t} and s = a+b-c the t-integral is a Mellin
// transform of C(u) = int int r^{n-2} (1+(u+x)^2+r^2)^{-a} (1+x^2+r^2)^{-b}.
// C continues analytically to Re u > 0, and on the ray u = rho e^{i phi} it can
// be written with the x-contour rotated by the same angle,
//
//   C(rho e^{i phi}) = e^{i phi} int dxi int dr r^{n-2}
//                      (1+r^2+e^{2i phi}(rho+xi)^2)^{-a} (1+r^2+e^{2i phi} xi^2)^{-b},
//
// where every base stays off the negative real axis.  Rotating the Mellin ray
// towards arg u = sign(Im s) pi/2 turns the oscillation e^{-i t Im s}, whose
// integral is exponentially small, into decay; the remaining cancellation is
// only exp(opening * |Im s|) with opening = pi/2 - |phi|.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "triprod/gamma.hpp"
#include "triprod/quadrature.hpp"
#include "triprod/settings.hpp"

namespace triprod {

/// Arguments (a, b, c) of I_n.
struct AbcParams {
  cplx a, b, c;
  int n = 1;
};

/// The parameters lie outside the region where the integral provably converges.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Sufficient absolute-convergence test for I_n (x_power = 0) and I_n' (x_power = 1).
///
/// Near u = e^{-t} -> 0 the integrand behaves like u^{Re s}; for u -> inf the
/// inner integral decays like u^{-m} (up to a log) with m the smallest of the
/// exponents of the three regions x ~ 0, x ~ -u and |x| ~ u.
struct Convergence {
  bool ok = false;
  double decay_small_u = 0.0;  // exponent for t -> +inf
  double decay_large_u = 0.0;  // exponent for t -> -inf
  std::string reason;
};

inline Convergence convergence(const AbcParams& p, int x_power = 0) {
  Convergence cv;
  if (p.n < 1) {
    cv.reason = "n must be >= 1";
    return cv;
  }
  const double ra = p.a.real(), rb = p.b.real(), rs = (p.a + p.b - p.c).real();
  const double n = p.n, q = x_power;
  if (2.0 * (ra + rb) <= n + q) {
    cv.reason = "inner integral diverges: 2 Re(a+b) <= n + x_power";
    return cv;
  }
  // For x_power = 1 the x ~ 0 leading term is odd and integrates to zero.
  const double m = std::min({2.0 * ra + q, 2.0 * rb - q, 2.0 * (ra + rb) - n - q});
  cv.decay_small_u = rs;
  cv.decay_large_u = m - rs;
  if (rs <= 0.0) {
    cv.reason = "divergent as t -> +inf: Re(a+b-c) <= 0";
    return cv;
  }
  if (m - rs <= 0.0) {
    cv.reason = "divergent as t -> -inf: Re(a+b-c) >= decay exponent of the inner integral";
    return cv;
  }
  cv.ok = true;
  return cv;
}

/// Integrand of I_n on the real contour; r is ignored for n = 1.
inline cplx integrand(const AbcParams& p, double t, double x, double r) {
  const double e = std::exp(-t);
  const double rr = p.n == 1 ? 0.0 : r * r;
  const double qa = 1.0 + (e + x) * (e + x) + rr;
  const double qb = 1.0 + x * x + rr;
  cplx v = std::exp(t * (p.c - p.a - p.b) - p.a * std::log(qa) - p.b * std::log(qb));
  if (p.n > 2) v *= std::pow(r, p.n - 2);
  return v;
}

/// Integrand of I_n' (extra factor x).
inline cplx integrand_prime(const AbcParams& p, double t, double x, double r) {
  return x * integrand(p, t, x, r);
}

/// c_1 = 1, c_n = (n-1) vol(B_{n-1}).
inline double c_n(int n) {
  if (n < 1) throw DomainError("c_n: n must be >= 1");
  if (n == 1) return 1.0;
  const double k = n - 1;
  return k * std::pow(std::numbers::pi, 0.5 * k) / std::exp(std::lgamma(0.5 * k + 1.0));
}

struct TripleOptions {
  double tol = 1e-6;
  int x_power = 0;                     // 1 evaluates I_n'
  std::optional<double> contour_angle;  // default: chosen from Im(a+b-c)
  double min_opening = 0.08;           // lower bound for pi/2 - |angle|
};

/// Full record of one evaluation.
struct TripleEvaluation {
  QuadResult quad;
  TruncationSpec truncation;
  double contour_angle = 0.0;
  Convergence convergence;
};

/// Mellin-ray angle for a given s: none for slowly oscillating integrands,
/// otherwise opening pi/2 - |phi| = max(2/|Im s|, min_opening).
inline double default_contour_angle(cplx s, double min_opening = 0.08) {
  const double w = std::abs(s.imag());
  const double half_pi = 0.5 * std::numbers::pi;
  if (w == 0.0) return 0.0;
  const double opening = std::max(2.0 / w, min_opening);
  if (opening >= half_pi) return 0.0;
  return std::copysign(half_pi - opening, s.imag());
}

namespace detail {

// Share of the x-integral tolerance given to the r-integral (both measured
// against the integral of |f|), tail cut-off, initial t-panel length.
inline constexpr double kInner = 0.2;
inline constexpr double kTail = 0.1;
inline constexpr double kPanel = 4.0;

// Evaluator for one (a, b, c, n, x_power, angle).
class ReducedIntegral {
 public:
  ReducedIntegral(const AbcParams& p, int x_power, double angle) : p_(p), xp_(x_power), phi_(angle) {
    e2_ = std::polar(1.0, 2.0 * phi_);
    s_ = p.a + p.b - p.c;
    // log |base| is smallest where Re(1 + r^2 + e2 X^2) vanishes.
    singular_ = -std::cos(2.0 * phi_);
    real_ = phi_ == 0.0 && p.a.imag() == 0.0 && p.b.imag() == 0.0;
    // In w = asinh(distance) the x-integrand decays like e^{-decay_x w} and the
    // r-integrand like e^{-decay_r w}.
    const double sab = 2.0 * (p.a + p.b).real();
    decay_x_ = std::max(0.05, sab - p.n - x_power);
    decay_r_ = std::max(0.05, sab - p.n + 1.0);
  }

  // Amplitude A(t) = e^{-t Re s} C(e^{-t}); the outer integrand is
  // e^{-i t Im s} A(t).  rel is measured against the x-integral of |.|.
  Estimate amplitude(double t, double rel) const {
    const double rho = std::exp(-t);
    const Estimate c = mellin_kernel(rho, rel);
    const double w = std::exp(-t * s_.real());
    return {w * c.value, w * c.err};
  }

  cplx s() const { return s_; }

  std::int64_t evals() const { return evals_; }
  cplx prefactor() const { return std::exp(cplx(0.0, phi_) * (s_ + 1.0 + static_cast<double>(xp_))); }

 private:
  // log of (1 + rr + e2 X^2)^{-a} (1 + rr + e2 Y^2)^{-b}
  cplx log_kernel(double rr, double x, double y) const {
    if (real_) return -p_.a.real() * std::log(1.0 + rr + x * x) - p_.b.real() * std::log(1.0 + rr + y * y);
    if (phi_ == 0.0) return -p_.a * std::log(1.0 + rr + x * x) - p_.b * std::log(1.0 + rr + y * y);
    const cplx qa = 1.0 + rr + e2_ * (x * x);
    const cplx qb = 1.0 + rr + e2_ * (y * y);
    return -p_.a * std::log(qa) - p_.b * std::log(qb);
  }

  static cplx log1p_c(cplx z) {
    if (std::abs(z) < 1e-3) return z * (1.0 - z * (0.5 - z * (1.0 / 3.0 - z * (0.25 - 0.2 * z))));
    return std::log(1.0 + z);
  }
  static cplx expm1_c(cplx w) {
    if (std::abs(w) < 1e-3) return w * (1.0 + 0.5 * w * (1.0 + w / 3.0 * (1.0 + 0.25 * w * (1.0 + 0.2 * w))));
    return std::exp(w) - 1.0;
  }

  // exp(lj) [K(rho + y, y) - K(rho - y, y)] for 0 <= y <= rho / 2, K = exp(log_kernel).
  // With the extra factor y the two halves of the y ~ 0 peak nearly cancel;
  // the difference of the a-factors is 4 rho y e2 exactly, so take it in log form.
  cplx odd_pair(double rr, double rho, double y, double lj) const {
    const double d = rho - y;
    const cplx qm = 1.0 + rr + e2_ * (d * d);
    const cplx z = e2_ * (4.0 * rho * y) / qm;
    const cplx lg = lj - p_.a * std::log(qm) - p_.b * std::log(1.0 + rr + e2_ * (y * y));
    return std::exp(lg) * expm1_c(-p_.a * log1p_c(z));
  }

  // Integrands decay algebraically, i.e. exponentially in w after the sinh
  // maps.  Ranges stop kDecades e-folds past the last scale.
  static constexpr double kDecades = 40.0;

  // Inner integral over r in (0, inf), r = sinh(w), w in [0, w_cut].
  // The error target is max(kInner rel * int |f|, abs_tol).
  // pair_rho > 0 switches to odd_pair(., pair_rho, y, .).
  Estimate radial(double x, double y, double rel, double abs_tol, double pair_rho = 0.0) const {
    const int n = p_.n;
    const double big = std::max({1.0, std::abs(x), std::abs(y)});
    const double w_cut = std::asinh(big) + kDecades / decay_r_;
    auto g = [&](double u) -> cplx {
      const double w = u * w_cut;
      const double r = std::sinh(w);
      double lj = std::log(std::cosh(w) * w_cut);
      if (n > 2) {
        if (r == 0.0) return 0.0;
        lj += (n - 2) * std::log(r);
      }
      if (pair_rho > 0.0) return odd_pair(r * r, pair_rho, y, lj);
      if (real_) return std::exp(lj + log_kernel(r * r, x, y).real());
      return std::exp(lj + log_kernel(r * r, x, y));
    };
    std::vector<double> pts = {0.0, 1.0};
    auto add_r = [&](double r) {
      if (r > 0.0 && std::isfinite(r)) {
        const double u = std::asinh(r) / w_cut;
        if (u < 1.0) pts.push_back(u);
      }
    };
    add_r(std::max(1.0, std::abs(x)));
    add_r(std::max(1.0, std::abs(y)));
    if (singular_ > 0.0) {
      add_r(std::sqrt(std::max(0.0, singular_ * x * x - 1.0)));
      add_r(std::sqrt(std::max(0.0, singular_ * y * y - 1.0)));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              pts.end());
    QuadOptions opt;
    opt.rel_tol = kInner * rel;
    opt.abs_tol = abs_tol;
    opt.l1_relative = true;
    opt.max_segments = 400;
    const auto r = adaptive<cplx>(g, std::span<const double>(pts), opt);
    evals_ += r.evals;
    return {r.value, r.err};
  }

  // C(rho e^{i phi}) / e^{i phi}, integrated over xi in four sinh-mapped pieces
  // around the peaks xi = 0 and xi = -rho.
  Estimate mellin_kernel(double rho, double rel) const {
    struct Piece {
      double center, sign, w_max;
    };
    const double half = std::asinh(0.5 * rho);
    const double far = std::asinh(rho) + kDecades / decay_x_;
    const std::array<Piece, 4> pieces = {Piece{0.0, 1.0, far}, Piece{0.0, -1.0, half}, Piece{-rho, 1.0, half},
                                         Piece{-rho, -1.0, far}};
    // x = rho + xi and y = xi are both formed from the offset to the nearer
    // peak; forming rho + xi directly cancels catastrophically for large rho.
    auto locate = [&](double v, double& x, double& y, double& jac) {
      const int k = std::clamp(static_cast<int>(std::floor(v)), 0, 3);
      const Piece& pc = pieces[static_cast<std::size_t>(k)];
      const double w = (v - k) * pc.w_max;
      const double off = pc.sign * std::sinh(w);
      if (k < 2) {
        y = off;
        x = rho + off;
      } else {
        x = off;
        y = off - rho;
      }
      jac = std::cosh(w) * pc.w_max;
    };

    // For x_power = 1, y in [-rho/2, 0] (piece 1) is folded onto piece 0.
    const bool fold = xp_ > 0;
    auto folded = [&](double v, double y) { return fold && v < 1.0 && y <= 0.5 * rho; };

    std::vector<double> pts = {0.0, 1.0, 2.0, 3.0, 4.0};
    if (fold && half < pieces[0].w_max) pts.push_back(half / pieces[0].w_max);
    auto add_offset = [&](double dist) {
      if (!(dist > 0.0)) return;
      const double w = std::asinh(dist);
      for (int k = 0; k < 4; ++k) {
        const double u = w / pieces[static_cast<std::size_t>(k)].w_max;
        if (u > 0.0 && u < 1.0) pts.push_back(k + u);
      }
    };
    add_offset(1.0);
    if (singular_ > 0.0) add_offset(1.0 / std::sqrt(singular_));
    std::sort(pts.begin(), pts.end());

    QuadOptions opt;
    opt.rel_tol = rel;
    opt.l1_relative = true;
    opt.max_segments = 600;
    const double xp = xp_;
    if (p_.n == 1) {
      auto g = [&](double v) -> cplx {
        double x = 0.0, y = 0.0, jac = 0.0;
        locate(v, x, y, jac);
        if (fold && v >= 1.0 && v < 2.0) return 0.0;
        if (folded(v, y)) return jac * y * odd_pair(0.0, rho, y, 0.0);
        cplx val = real_ ? cplx(jac * std::exp(log_kernel(0.0, x, y).real())) : jac * std::exp(log_kernel(0.0, x, y));
        if (xp > 0.0) val *= y;
        return val;
      };
      const auto r = adaptive<cplx>(g, std::span<const double>(pts), opt);
      evals_ += r.evals;
      return {r.value, r.err};
    }
    // Peak density of the x-integrand sets an absolute floor for the
    // r-integrals, so that far nodes with negligible weight stay cheap.
    auto density = [&](double v, double rel_r, double abs_r) -> Estimate {
      double x = 0.0, y = 0.0, jac = 0.0;
      locate(v, x, y, jac);
      double scale = jac;
      if (xp > 0.0) scale *= y;
      if (fold && v >= 1.0 && v < 2.0) return {};
      if (scale == 0.0) return {};
      return scale * radial(x, y, rel_r, abs_r / std::abs(scale), folded(v, y) ? rho : 0.0);
    };
    double peak = 0.0;
    for (double v : {0.0, 1.0 - 1e-9, 3.0, 4.0 - 1e-9}) peak = std::max(peak, std::abs(density(v, 1e-3, 0.0).value));
    for (double v : {0.5 / pieces[0].w_max, 3.0 + 0.5 / pieces[3].w_max})
      peak = std::max(peak, std::abs(density(v, 1e-3, 0.0).value));
    const double abs_r = 0.01 * kInner * rel * peak;
    auto g = [&](double v) -> Estimate { return density(v, rel, abs_r); };
    const auto r = adaptive<Estimate>(g, std::span<const double>(pts), opt);
    return {r.value.value, r.err + r.value.err};
  }

  AbcParams p_;
  int xp_;
  double phi_;
  cplx e2_, s_;
  double singular_;
  bool real_;
  double decay_x_, decay_r_;
  mutable std::atomic<std::int64_t> evals_{0};
};

inline TripleEvaluation evaluate_reduced(const AbcParams& p, const TripleOptions& opt) {
  if (!(opt.tol > 0.0)) throw DomainError("i_n: tol must be positive");
  TripleEvaluation ev;
  ev.convergence = convergence(p, opt.x_power);
  if (!ev.convergence.ok) throw DivergenceError("I_n: " + ev.convergence.reason);
  const cplx s = p.a + p.b - p.c;
  const double phi = opt.contour_angle.value_or(default_contour_angle(s, opt.min_opening));
  if (!(std::abs(phi) < 0.5 * std::numbers::pi)) throw DomainError("i_n: contour angle must lie in (-pi/2, pi/2)");
  ev.contour_angle = phi;

  const ReducedIntegral ri(p, opt.x_power, phi);
  const double omega = s.imag();
  // Expected ratio |I| / int |A|: the oscillation cancels about
  // exp(-(pi/2 - |phi|) |Im s|) of the mass.
  const double cancel = std::exp(-(0.5 * std::numbers::pi - std::abs(phi)) * std::abs(omega));

  const double kp = 0.8 * ev.convergence.decay_small_u;
  const double km = 0.8 * ev.convergence.decay_large_u;
  double tighten = 1.0;
  for (int round = 0; round < 3; ++round) {
    const double rel_c = 0.1 * opt.tol * cancel * tighten;

    // Coarse scan for the scale of A, then truncate where the exponential
    // tails drop below a small fraction of it.  The 0.8 factor on the decay
    // exponents absorbs the logarithm on the convergence boundary.
    std::vector<double> scan(17);
    parallel_for(scan.size(), [&](std::size_t k) { scan[k] = std::abs(ri.amplitude(double(k) - 8.0, 1e-3).value); },
                 true);
    double peak = 0.0, l1 = 0.0;
    for (double v : scan) {
      peak = std::max(peak, v);
      l1 += v;
    }
    if (!(peak > 0.0) || !std::isfinite(peak)) peak = l1 = 1.0;
    const double target = kTail * opt.tol * cancel * tighten * peak;
    auto reach = [&](double kappa) { return std::clamp(std::log(peak / (kappa * target)) / kappa, 8.0, 400.0); };
    const double t_hi = reach(kp), t_lo = -reach(km);

    const int count = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / kPanel)));
    std::vector<double> edges(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) edges[static_cast<std::size_t>(i)] = t_lo + (t_hi - t_lo) * i / count;
    const double bound = 0.3 * opt.tol * cancel * tighten * l1 / (t_hi - t_lo);
    const ChebyshevPanels amp([&](double t) { return ri.amplitude(t, rel_c); }, std::span<const double>(edges),
                              bound, 1e-4, true);

    // Oscillatory outer integral of the interpolant.
    std::vector<double> pts;
    const double piece = omega != 0.0 ? std::min(kPanel, std::numbers::pi / std::abs(omega)) : kPanel;
    for (const auto& pn : amp.panels()) {
      const int k = std::max(1, static_cast<int>(std::ceil((pn.b - pn.a) / piece)));
      for (int i = 0; i < k; ++i) pts.push_back(pn.a + (pn.b - pn.a) * i / k);
    }
    pts.push_back(amp.panels().back().b);
    QuadOptions outer;
    outer.rel_tol = 1e-3 * opt.tol;
    outer.abs_tol = 1e-3 * bound;
    outer.max_segments = std::max(20000, 4 * static_cast<int>(pts.size()));
    auto f = [&](double t) { return std::polar(1.0, -omega * t) * amp(t); };
    const auto r = adaptive<cplx>(f, std::span<const double>(pts), outer);

    const double tail = std::abs(amp.panels().back().ends[1]) / kp + std::abs(amp.panels().front().ends[0]) / km;
    const cplx pre = ri.prefactor();
    const double apre = std::abs(pre);
    ev.truncation = TruncationSpec{std::max(t_hi, -t_lo), std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(), apre * tail};
    ev.quad.value = pre * r.value;
    ev.quad.abs_err = apre * (r.err + amp.l1_error() + tail);
    ev.quad.evals = ri.evals();
    if (!r.converged || !amp.converged())
      throw QuadratureError("i_n: outer quadrature did not reach tolerance", ev.quad);
    const double want = opt.tol * std::abs(ev.quad.value);
    if (ev.quad.abs_err <= want) return ev;
    tighten *= std::max(1e-3, 0.5 * want / ev.quad.abs_err);
  }
  throw QuadratureError("i_n: error estimate above tolerance", ev.quad);
}

}  // namespace detail

/// I_n(a, b, c) with relative tolerance tol.
inline QuadResult i_n(const AbcParams& p, double tol) {
  TripleOptions opt;
  opt.tol = tol;
  return detail::evaluate_reduced(p, opt).quad;
}

inline TripleEvaluation i_n_detailed(const AbcParams& p, const TripleOptions& opt) {
  return detail::evaluate_reduced(p, opt);
}

/// I_n'(a, b, c): I_n with an extra factor x in the integrand.
inline QuadResult i_n_prime(const AbcParams& p, double tol) {
  TripleOptions opt;
  opt.tol = tol;
  opt.x_power = 1;
  return detail::evaluate_reduced(p, opt).quad;
}

/// Shifted arguments (lam + n/2, mu + n/2, nu + n/2).
inline AbcParams shifted_params(const SpectralTriple& st) {
  const double h = 0.5 * st.dim.n();
  return {st.lam + h, st.mu + h, st.nu + h, st.dim.n()};
}

/// T_st(lam, mu, nu) = c_n I_n(lam + n/2, mu + n/2, nu + n/2).
///
/// With reorder set, the argument with the largest imaginary part is moved
/// into the c slot (I_n is symmetric), where a large parameter only enters
/// through the Mellin exponent.
inline QuadResult t_st_numeric(const SpectralTriple& st, double tol, bool reorder = true) {
  AbcParams p = shifted_params(st);
  if (reorder) {
    std::array<cplx, 3> v = {p.a, p.b, p.c};
    std::stable_sort(v.begin(), v.end(), [](cplx x, cplx y) { return std::abs(x.imag()) < std::abs(y.imag()); });
    p = {v[0], v[1], v[2], p.n};
  }
  QuadResult r = i_n(p, tol);
  const double cn = c_n(st.dim.n());
  r.value *= cn;
  r.abs_err *= cn;
  return r;
}

}  // namespace triprod

#endif  // TRIPROD_TRIPLE_PRODUCT_HPP
