#ifndef TRIPROD_QUADRATURE_HPP
#define TRIPROD_QUADRATURE_HPP

// Adaptive Gauss-Kronrod (10/21) quadrature for real or complex integrands,
// iterated 3D integration over truncated boxes, and Haar Monte Carlo on SO(d).

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "triprod/haar.hpp"
#include "triprod/settings.hpp"

namespace triprod {

using cplx = std::complex<double>;

/// Value, absolute error estimate and integrand evaluation count.
struct QuadResult {
  cplx value{0.0, 0.0};
  double abs_err = 0.0;
  std::int64_t evals = 0;
};

/// Adaptive refinement ran out of subdivisions; carries the best estimate.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, QuadResult best) : Error(what), best_(best) {}
  const QuadResult& best() const { return best_; }

 private:
  QuadResult best_;
};

/// Box truncation of an integral over R x R x (0, inf) in (t, x, r).
/// x_max and r_max may be infinite, in which case that axis is mapped onto a
/// finite interval instead of cut.  tail_bound estimates the omitted mass.
struct TruncationSpec {
  double t_max = 30.0;
  double x_max = std::numeric_limits<double>::infinity();
  double r_max = std::numeric_limits<double>::infinity();
  double tail_bound = 0.0;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_segments = 4000;
  bool parallel = false;  // evaluate segment batches on worker threads
  bool l1_relative = false;  // rel_tol measured against int |f| instead of |int f|
};

namespace detail {

/// Value paired with the error carried in from an inner integration.
struct Estimate {
  cplx value{0.0, 0.0};
  double err = 0.0;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    err += o.err;
    return *this;
  }
  friend Estimate operator+(Estimate a, const Estimate& b) { return a += b; }
  friend Estimate operator-(Estimate a, const Estimate& b) { return {a.value - b.value, a.err + b.err}; }
  friend Estimate operator*(double s, const Estimate& a) { return {s * a.value, std::abs(s) * a.err}; }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
inline double magnitude(const Estimate& v) { return std::abs(v.value); }

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
inline bool finite(const Estimate& v) { return finite(v.value) && std::isfinite(v.err); }

// Kronrod abscissae (descending) with Gauss points at odd indices.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V>
struct Segment {
  double a = 0.0, b = 0.0;
  V value{};
  double err = 0.0;
  double resabs = 0.0;
  double carried = 0.0;  // error carried in from inner integrations
  bool finite = true;
};

// One 21-point Kronrod panel with the QUADPACK error heuristic.
template <class V, class F>
Segment<V> gk21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<V, 21> fv;
  fv[10] = f(centr);
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * kXgk[j];
    fv[j] = f(centr - absc);
    fv[20 - j] = f(centr + absc);
  }

  V resk = kWgk[10] * fv[10];
  V resg{};
  double resabs = kWgk[10] * magnitude(fv[10]);
  for (int j = 0; j < 10; ++j) {
    const V pair = fv[j] + fv[20 - j];
    resk = resk + kWgk[j] * pair;
    resabs += kWgk[j] * (magnitude(fv[j]) + magnitude(fv[20 - j]));
    if (j % 2 == 1) resg = resg + kWg[j / 2] * pair;
  }
  const V reskh = 0.5 * resk;
  double resasc = kWgk[10] * magnitude(fv[10] - reskh);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (magnitude(fv[j] - reskh) + magnitude(fv[20 - j] - reskh));

  Segment<V> s;
  s.a = a;
  s.b = b;
  s.value = hlgth * resk;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double err = magnitude(hlgth * (resk - resg));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  s.err = err;
  s.resabs = resabs;
  if constexpr (std::is_same_v<V, Estimate>) s.carried = s.value.err;
  s.finite = finite(s.value) && std::isfinite(err);
  return s;
}

/// Runs fn(i) for i in [0, count) on up to thread_count() workers.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, bool parallel) {
  const unsigned workers = parallel ? std::min<unsigned>(thread_count(), static_cast<unsigned>(count)) : 1u;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

template <class V>
struct Adaptive {
  V value{};
  double err = 0.0;      // discretization error
  double carried = 0.0;  // propagated inner error
  double resabs = 0.0;   // integral of |f|
  std::int64_t evals = 0;
  bool converged = true;
};

// Globally adaptive bisection over the intervals delimited by `points`.
// Every round bisects all segments whose error is within a factor two of the
// worst one, so the refinement sequence does not depend on the worker count.
template <class V, class F>
Adaptive<V> adaptive(F&& f, std::span<const double> points, const QuadOptions& opt) {
  std::vector<Segment<V>> segs;
  {
    std::vector<std::pair<double, double>> init;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
      if (points[i + 1] > points[i]) init.emplace_back(points[i], points[i + 1]);
    segs.resize(init.size());
    parallel_for(init.size(), [&](std::size_t i) { segs[i] = gk21<V>(f, init[i].first, init[i].second); },
                 opt.parallel);
  }
  std::int64_t evals = 21 * static_cast<std::int64_t>(segs.size());

  auto total = [&] {
    Adaptive<V> r;
    for (const auto& s : segs) {
      r.value = r.value + s.value;
      r.err += s.err;
      r.carried += s.carried;
      r.resabs += s.resabs;
    }
    return r;
  };

  while (true) {
    Adaptive<V> r = total();
    r.evals = evals;
    const double target = std::max(opt.abs_tol, opt.rel_tol * (opt.l1_relative ? r.resabs : magnitude(r.value)));
    bool all_finite = std::all_of(segs.begin(), segs.end(), [](const auto& s) { return s.finite; });
    if (!all_finite) {
      r.converged = false;
      return r;
    }
    if (r.err <= target) return r;
    if (static_cast<int>(segs.size()) >= opt.max_segments) {
      r.converged = false;
      return r;
    }
    double worst = 0.0;
    for (const auto& s : segs) worst = std::max(worst, s.err);
    std::vector<std::size_t> split;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      const double mid = 0.5 * (s.a + s.b);
      const bool splittable = mid > s.a && mid < s.b;
      if (splittable && s.err >= 0.5 * worst) split.push_back(i);
    }
    if (split.empty()) {
      r.converged = false;
      return r;
    }
    const std::size_t room = static_cast<std::size_t>(opt.max_segments) - segs.size();
    if (split.size() > room) split.resize(std::max<std::size_t>(room, 1));
    std::vector<Segment<V>> halves(2 * split.size());
    parallel_for(
        halves.size(),
        [&](std::size_t h) {
          const auto& s = segs[split[h / 2]];
          const double mid = 0.5 * (s.a + s.b);
          halves[h] = (h % 2 == 0) ? gk21<V>(f, s.a, mid) : gk21<V>(f, mid, s.b);
        },
        opt.parallel);
    evals += 21 * static_cast<std::int64_t>(halves.size());
    for (std::size_t k = 0; k < split.size(); ++k) {
      segs[split[k]] = halves[2 * k];
      segs.push_back(halves[2 * k + 1]);
    }
  }
}

// Maps for infinite ranges onto (0,1) or (-1,1).
struct RangeMap {
  enum class Kind { finite, upper_infinite, lower_infinite, both_infinite } kind;
  double lo, hi;

  static RangeMap make(double lo, double hi) {
    const bool li = std::isinf(lo), hi_inf = std::isinf(hi);
    if (!li && !hi_inf) return {Kind::finite, lo, hi};
    if (!li) return {Kind::upper_infinite, lo, hi};
    if (!hi_inf) return {Kind::lower_infinite, lo, hi};
    return {Kind::both_infinite, lo, hi};
  }
  double u_lo() const { return kind == Kind::both_infinite ? -1.0 : (kind == Kind::finite ? lo : 0.0); }
  double u_hi() const { return kind == Kind::finite ? hi : 1.0; }

  // Returns (x, dx/du); dx/du = 0 flags the excluded endpoint.
  std::pair<double, double> operator()(double u) const {
    switch (kind) {
      case Kind::finite:
        return {u, 1.0};
      case Kind::upper_infinite: {
        const double w = 1.0 - u;
        return {lo + u / w, 1.0 / (w * w)};
      }
      case Kind::lower_infinite: {
        const double w = 1.0 - u;
        return {hi - u / w, 1.0 / (w * w)};
      }
      case Kind::both_infinite: {
        const double w = 1.0 - u * u;
        return {u / w, (1.0 + u * u) / (w * w)};
      }
    }
    return {u, 1.0};
  }
};

template <class V, class F>
Adaptive<V> adaptive_range(F&& f, double lo, double hi, const QuadOptions& opt) {
  const RangeMap map = RangeMap::make(lo, hi);
  auto g = [&](double u) -> V {
    const auto [x, jac] = map(u);
    if (!std::isfinite(x) || !std::isfinite(jac)) return V{};
    const V fx = f(x);
    if (!finite(fx)) return fx;
    return jac * fx;
  };
  const std::array<double, 2> pts = {map.u_lo(), map.u_hi()};
  return adaptive<V>(g, std::span<const double>(pts), opt);
}

// Piecewise Chebyshev interpolant of a smooth complex function, built from
// values at the 17 Lobatto points of each panel.  A panel is accepted when its
// trailing coefficients fall below an absolute bound, otherwise it is halved.
class ChebyshevPanels {
 public:
  static constexpr int kDegree = 16;

  struct Panel {
    double a = 0.0, b = 0.0;
    std::array<cplx, kDegree + 1> coef{};
    double tail = 0.0;     // interpolation error estimate (sup norm)
    double carried = 0.0;  // mean error of the sampled values
    std::array<cplx, 2> ends{};  // values at a and b
  };

  // f(t) returns Estimate.  Panels shorter than min_length are accepted
  // unconditionally and flagged through converged().
  template <class F>
  ChebyshevPanels(F&& f, std::span<const double> edges, double bound, double min_length, bool parallel) {
    std::vector<std::pair<double, double>> todo;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (edges[i + 1] > edges[i]) todo.emplace_back(edges[i], edges[i + 1]);
    while (!todo.empty()) {
      const std::size_t m = kDegree + 1;
      std::vector<Estimate> vals(todo.size() * m);
      parallel_for(
          vals.size(),
          [&](std::size_t k) {
            const auto [a, b] = todo[k / m];
            const double x = std::cos(std::numbers::pi * static_cast<double>(k % m) / kDegree);
            vals[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
          },
          parallel);
      evals_ += static_cast<std::int64_t>(vals.size());
      std::vector<std::pair<double, double>> next;
      for (std::size_t i = 0; i < todo.size(); ++i) {
        Panel pn = fit(todo[i].first, todo[i].second, std::span<const Estimate>(vals.data() + i * m, m));
        const double len = pn.b - pn.a;
        if (pn.tail <= bound || !std::isfinite(pn.tail) || len < min_length) {
          if (pn.tail > bound) converged_ = false;
          panels_.push_back(pn);
        } else {
          const double mid = 0.5 * (pn.a + pn.b);
          next.emplace_back(pn.a, mid);
          next.emplace_back(mid, pn.b);
        }
      }
      todo = std::move(next);
    }
    std::sort(panels_.begin(), panels_.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  }

  cplx operator()(double t) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), t, [](double v, const Panel& p) { return v < p.a; });
    if (it != panels_.begin()) --it;
    const Panel& p = *it;
    const double x = std::clamp((2.0 * t - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    // Clenshaw
    cplx b1 = 0.0, b2 = 0.0;
    for (int k = kDegree; k >= 1; --k) {
      const cplx b0 = 2.0 * x * b1 - b2 + p.coef[static_cast<std::size_t>(k)];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + p.coef[0];
  }

  const std::vector<Panel>& panels() const { return panels_; }
  bool converged() const { return converged_; }
  std::int64_t evals() const { return evals_; }

  // Sum over panels of length * (tail + carried): bound on the L1 distance to f.
  double l1_error() const {
    double e = 0.0;
    for (const auto& p : panels_) e += (p.b - p.a) * (p.tail + p.carried);
    return e;
  }

 private:
  static Panel fit(double a, double b, std::span<const Estimate> v) {
    Panel p;
    p.a = a;
    p.b = b;
    const int n = kDegree;
    for (int k = 0; k <= n; ++k) {
      cplx c = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        c += w * v[static_cast<std::size_t>(j)].value * std::cos(std::numbers::pi * j * k / n);
      }
      c *= 2.0 / n;
      if (k == 0 || k == n) c *= 0.5;
      p.coef[static_cast<std::size_t>(k)] = c;
    }
    double carried = 0.0;
    for (const auto& e : v) carried += e.err;
    p.carried = carried / static_cast<double>(v.size());
    p.tail = 2.0 * std::max({std::abs(p.coef[n - 2]), std::abs(p.coef[n - 1]), std::abs(p.coef[n])});
    // Lobatto node j = 0 is x = 1 (t = b).
    p.ends = {v[static_cast<std::size_t>(n)].value, v[0].value};
    return p;
  }

  std::vector<Panel> panels_;
  bool converged_ = true;
  std::int64_t evals_ = 0;
};

}  // namespace detail

/// Adaptive integral of f over [lo, hi]; either bound may be infinite.
/// Throws QuadratureError (with the best estimate) when the tolerance is not met.
template <class F>
QuadResult integrate_1d(F&& f, double lo, double hi, double tol, int max_segments = 4000) {
  if (!(tol > 0.0)) throw DomainError("integrate_1d: tol must be positive");
  if (!(hi >= lo)) throw DomainError("integrate_1d: need lo <= hi");
  QuadOptions opt;
  opt.rel_tol = tol;
  opt.max_segments = max_segments;
  auto g = [&](double x) -> cplx { return cplx(f(x)); };
  const auto r = detail::adaptive_range<cplx>(g, lo, hi, opt);
  QuadResult out{r.value, r.err, r.evals};
  if (!r.converged) throw QuadratureError("integrate_1d: tolerance not reached", out);
  return out;
}

/// Iterated adaptive integral of f(t, x, r) over [-t_max, t_max] x [-x_max, x_max] x [0, r_max],
/// innermost r, then x, then t.  abs_err adds the propagated inner errors and trunc.tail_bound.
template <class F>
QuadResult integrate_triple(F&& f, const TruncationSpec& trunc, double tol) {
  if (!(tol > 0.0)) throw DomainError("integrate_triple: tol must be positive");
  if (!(trunc.t_max > 0.0 && trunc.x_max > 0.0 && trunc.r_max > 0.0 && trunc.tail_bound >= 0.0))
    throw DomainError("integrate_triple: truncation extents must be positive");
  using detail::Estimate;
  std::atomic<std::int64_t> evals{0};
  QuadOptions inner;
  inner.rel_tol = 0.04 * tol;
  QuadOptions middle;
  middle.rel_tol = 0.2 * tol;
  QuadOptions outer;
  outer.rel_tol = tol;
  outer.parallel = true;

  auto over_x = [&](double t) -> Estimate {
    auto over_r = [&](double x) -> Estimate {
      auto fr = [&](double r) -> cplx { return cplx(f(t, x, r)); };
      const auto in = detail::adaptive_range<cplx>(fr, 0.0, trunc.r_max, inner);
      evals += in.evals;
      return {in.value, in.err};
    };
    const auto mid = detail::adaptive_range<Estimate>(over_r, -trunc.x_max, trunc.x_max, middle);
    return {mid.value.value, mid.err + mid.value.err};
  };
  const auto out = detail::adaptive_range<Estimate>(over_x, -trunc.t_max, trunc.t_max, outer);
  QuadResult res{out.value.value, out.err + out.value.err + trunc.tail_bound, evals.load()};
  if (!out.converged) throw QuadratureError("integrate_triple: tolerance not reached", res);
  return res;
}

/// Haar-random rotation in SO(d) from a seed.
inline Eigen::MatrixXd haar_sample_k(int d, std::uint64_t seed) {
  if (d < 2) throw DomainError("haar_sample_k: d must be >= 2");
  Rng gen(seed);
  return haar_rotation(d, gen);
}

/// Monte Carlo mean of f over SO(d) with vol(K) = 1; abs_err is the standard error.
template <class F>
QuadResult mc_integrate_k(F&& f, int d, std::int64_t samples, std::uint64_t seed) {
  if (d < 2) throw DomainError("mc_integrate_k: d must be >= 2");
  if (samples < 2) throw DomainError("mc_integrate_k: need at least two samples");
  Rng gen(seed);
  cplx sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const cplx v = cplx(f(haar_rotation(d, gen)));
    sum += v;
    sum_sq += std::norm(v);
  }
  const double n = static_cast<double>(samples);
  const cplx mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * std::norm(mean)) / (n - 1.0));
  return {mean, std::sqrt(var / n), samples};
}

}  // namespace triprod

#endif  // TRIPROD_QUADRATURE_HPP
