// Evaluates T_st(lam, mu, nu) by quadrature along the unitary axis and prints
// its ratio to the Gamma-function expression.  Usage: ratio_demo [d] [tol]

#include <cstdio>
#include <cstdlib>

#include "triprod/triprod.hpp"

int main(int argc, char** argv) {
  using namespace triprod;
  const int d = argc > 1 ? std::atoi(argv[1]) : 2;
  const double tol = argc > 2 ? std::atof(argv[2]) : 1e-6;
  const Dimension dim(d);
  const cplx mu(0.0, 0.7), nu(0.0, 0.3);
  std::printf("d=%d  mu=0.7i  nu=0.3i  tol=%g\n", d, tol);
  std::printf("%8s  %24s  %24s  %22s\n", "Im lam", "T_st (quadrature)", "Gamma ratio", "ratio");
  for (double l : {0.5, 1.0, 2.0, 4.0}) {
    const SpectralTriple st(cplx(0.0, l), mu, nu, dim);
    const QuadResult t = t_st_numeric(st, tol);
    const cplx g = gamma_ratio(st);
    const cplx r = t.value / g;
    std::printf("%8.2f  %11.4e%+11.4ei  %11.4e%+11.4ei  %.10f%+.1ei\n", l, t.value.real(), t.value.imag(), g.real(),
                g.imag(), r.real(), r.imag());
  }
  return 0;
}
