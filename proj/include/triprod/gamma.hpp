#ifndef TRIPROD_GAMMA_HPP
#define TRIPROD_GAMMA_HPP

// Complex log-Gamma and the Gamma-ratio closed form for the class-one
// triple product, evaluated in log space so that factors decaying like
// exp(-pi |Im z| / 2) never underflow before they are combined.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "triprod/lorentz.hpp"
#include "triprod/settings.hpp"

namespace triprod {

/// Evaluation hit a pole of Gamma.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Induction parameters (lambda, mu, nu) with their dimension.
struct SpectralTriple {
  cplx lam, mu, nu;
  Dimension dim;

  SpectralTriple(cplx l, cplx m, cplx v, Dimension d) : lam(l), mu(m), nu(v), dim(d) {}

  /// All three parameters purely imaginary.
  bool on_unitary_axis(double tol = 1e-14) const {
    return std::abs(lam.real()) <= tol && std::abs(mu.real()) <= tol && std::abs(nu.real()) <= tol;
  }
};

namespace detail {

// Lanczos coefficients, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosP = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

// log Gamma(z) for Re z >= 1/2.
inline cplx log_gamma_lanczos(cplx z) {
  z -= 1.0;
  cplx x = kLanczosP[0];
  for (std::size_t i = 1; i < kLanczosP.size(); ++i) x += kLanczosP[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(pi z) without overflow for large |Im z|, modulo 2 pi i.
inline cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // sin w = e^{-iw} (1 - e^{2iw}) (i/2), with |e^{2iw}| <= 1 for Im w >= 0.
  const cplx w = pi * z;
  const cplx i(0.0, 1.0);
  return -i * w + std::log(i * 0.5) + std::log(1.0 - std::exp(2.0 * i * w));
}

inline bool is_pole(cplx z) {
  const double r = std::round(z.real());
  return r <= 0.0 && std::abs(z - cplx(r, 0.0)) < settings().pole_tol;
}

}  // namespace detail

/// Principal-branch log Gamma(z) for Re z > 0; modulo 2 pi i for Re z <= 0.
inline cplx log_gamma(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("log_gamma: non-finite argument");
  if (detail::is_pole(z)) throw PoleError("log_gamma: pole at non-positive integer");
  if (z.real() >= 0.5) return detail::log_gamma_lanczos(z);
  if (z.real() > 0.0) return detail::log_gamma_lanczos(z + 1.0) - std::log(z);
  // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
  return std::log(std::numbers::pi) - detail::log_sin_pi(z) - detail::log_gamma_lanczos(1.0 - z);
}

inline double log_gamma(double x) { return log_gamma(cplx(x, 0.0)).real(); }

/// The seven Gamma arguments of the closed form, numerators first.
struct GammaArguments {
  std::array<cplx, 4> numerator;
  std::array<cplx, 3> denominator;
};

inline GammaArguments gamma_arguments(const SpectralTriple& st) {
  const double n = st.dim.n();
  const cplx l = st.lam, m = st.mu, v = st.nu;
  return {{(2.0 * (l + m - v) + n) / 4.0, (2.0 * (l - m + v) + n) / 4.0,
           (2.0 * (-l + m + v) + n) / 4.0, (2.0 * (l + m + v) + n) / 4.0},
          {(2.0 * l + n) / 2.0, (2.0 * m + n) / 2.0, (2.0 * v + n) / 2.0}};
}

/// log of the Gamma ratio (mod 2 pi i).  Throws PoleError naming the factor.
inline cplx log_gamma_ratio(const SpectralTriple& st) {
  static constexpr std::array<const char*, 4> kNum = {
      "numerator Gamma((2(lam+mu-nu)+n)/4)", "numerator Gamma((2(lam-mu+nu)+n)/4)",
      "numerator Gamma((2(-lam+mu+nu)+n)/4)", "numerator Gamma((2(lam+mu+nu)+n)/4)"};
  static constexpr std::array<const char*, 3> kDen = {
      "denominator Gamma((2 lam+n)/2)", "denominator Gamma((2 mu+n)/2)", "denominator Gamma((2 nu+n)/2)"};
  const auto args = gamma_arguments(st);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (detail::is_pole(args.numerator[i])) throw PoleError(std::string("gamma_ratio: pole in ") + kNum[i]);
    acc += log_gamma(args.numerator[i]);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (detail::is_pole(args.denominator[i])) throw PoleError(std::string("gamma_ratio: pole in ") + kDen[i]);
    acc -= log_gamma(args.denominator[i]);
  }
  return acc;
}

inline cplx gamma_ratio(const SpectralTriple& st) { return std::exp(log_gamma_ratio(st)); }

/// log of the leading Stirling envelope sqrt(2 pi) e^{-pi |t| / 2} |t|^{sigma - 1/2} of |Gamma(sigma + i t)|.
inline double log_stirling_abs(double sigma, double t) {
  if (t == 0.0) throw DomainError("stirling_abs: t must be nonzero");
  const double at = std::abs(t);
  return detail::kLogSqrt2Pi - 0.5 * std::numbers::pi * at + (sigma - 0.5) * std::log(at);
}

// Underflows for |t| > ~450; use the log form there.
inline double stirling_abs(double sigma, double t) { return std::exp(log_stirling_abs(sigma, t)); }

/// Decay profile exp(-(pi/2)|lam|) |lam|^{d/2 - 2} of |T_st| along the unitary axis.
inline double log_asymptotic_envelope(double lam_im, Dimension dim) {
  if (lam_im == 0.0) throw DomainError("asymptotic_envelope: lambda must be nonzero");
  const double a = std::abs(lam_im);
  return -0.5 * std::numbers::pi * a + (0.5 * dim.d() - 2.0) * std::log(a);
}

inline double asymptotic_envelope(double lam_im, Dimension dim) {
  return std::exp(log_asymptotic_envelope(lam_im, dim));
}

}  // namespace triprod

#endif  // TRIPROD_GAMMA_HPP
