// Bound states of a symmetric double delta well at x = +-l, found with the argument principle and
// checked against the finite-difference operator.

#include <iostream>

#include "ptpoint/ptpoint.hpp"

using namespace ptpoint;

int main() {
  const double l = 1.0;
  const BoundaryMatrix2 B{1.0, 0.0, -2.0, 1.0};  // psi'(l+) - psi'(l-) = -2 psi(l)
  const TwoPoint spec{l, B};

  const SpectrumOptions opt{kDefaultTol, std::nullopt, DispersionForm::Determinant};
  const SpectrumReport r = compute_spectrum(spec, opt);
  const auto oracle = oracle_discrete_spectrum(spec, OracleConfig{10.0, 1000, 1e-4});

  std::cout << "lambda                 k                      residual   pt_defect\n";
  for (const auto& e : r.eigenvalues) {
    const PiecewiseExp psi = eigenfunction_two_point(B, l, e.k.k);
    std::cout << format_double(e.lambda.real()) << "  " << format_double(e.k.k.imag()) << "i  "
              << eigen_residual(psi, spec, e.lambda) << "  " << pt_symmetry_defect(psi) << '\n';
  }
  std::cout << "finite differences (L = 10, N = 1000):";
  for (cplx z : oracle) std::cout << ' ' << format_double(z.real());
  std::cout << '\n';
  return 0;
}
