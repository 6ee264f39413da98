#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "ptpoint/states.hpp"

using namespace ptpoint;
using std::numbers::pi;

namespace {

void expect_near(cplx a, cplx b, double tol) {
  EXPECT_NEAR(a.real(), b.real(), tol) << a << " vs " << b;
  EXPECT_NEAR(a.imag(), b.imag(), tol) << a << " vs " << b;
}

TypeIParams random_type_I(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2 * pi), bd(0.0, 5.0), u(0.0, 1.0);
  TypeIParams p{ang(rng), ang(rng), bd(rng), 0.0};
  const double cmin = -1.0 / p.b;
  p.c = cmin + (5.0 - cmin) * u(rng);
  if (1.0 + p.b * p.c < 0.0) p.c = cmin * (1.0 - 1e-15);
  return p;
}

// U = e^{-x^2} (a + b x) on each half-line and F = -U'' - lambda U
struct Manufactured {
  cplx am, bm, ap, bp;

  cplx u(double x) const {
    const cplx a = x > 0 ? ap : am, b = x > 0 ? bp : bm;
    return std::exp(-x * x) * (a + b * x);
  }
  cplx f(double x, cplx lambda) const {
    const cplx a = x > 0 ? ap : am, b = x > 0 ? bp : bm;
    const cplx g = a + b * x;
    const cplx upp = std::exp(-x * x) * (-2.0 * g - 4.0 * x * b + 4.0 * x * x * g);
    return -upp - lambda * u(x);
  }
};

Manufactured manufactured_connected(const BoundaryMatrix2& B) {
  const cplx am(0.7, -0.2), bm(-0.4, 0.9);
  return {am, bm, B.alpha * am + B.beta * bm, B.gamma * am + B.delta * bm};
}

double max_error(const InteractionSpec& spec, const Manufactured& m, cplx lambda, double L, int N) {
  const GridFunction F = GridFunction::sample(L, N, [&](double x) { return m.f(x, lambda); });
  const GridFunction U = apply_resolvent(spec, lambda, F);
  double e = 0.0;
  for (int j = 0; j < N; ++j) e = std::max(e, std::abs(U.values[j] - m.u(U.x(j))));
  return e;
}

}  // namespace

TEST(PiecewiseExp, EvaluationAndLimits) {
  const double inf = std::numeric_limits<double>::infinity();
  const PiecewiseExp f{{Piece{-inf, 0.0, 0.0, {{1.0, 1.0}}}, Piece{0.0, inf, 0.0, {{2.0, -1.0}}}}};
  expect_near(f(-1.0), std::exp(-1.0), 1e-15);
  expect_near(f(1.0), 2.0 * std::exp(-1.0), 1e-15);
  expect_near(f(0.0), 2.0, 1e-15);  // right piece at the breakpoint
  expect_near(f.limit(0.0, -1).first, 1.0, 1e-15);
  expect_near(f.limit(0.0, +1).second, -2.0, 1e-15);
  EXPECT_TRUE(f.square_integrable());
  EXPECT_THROW(f.limit(0.5, 1), Error);
  const PiecewiseExp g{{Piece{-inf, 0.0, 0.0, {{1.0, -1.0}}}, Piece{0.0, inf, 0.0, {}}}};
  EXPECT_FALSE(g.square_integrable());
}

TEST(EigenfunctionOrigin, Examples) {
  const auto psi = eigenfunction_origin(matrix_from_type_I({0, pi, 1, 0}), cplx(0, 2));
  for (double x : {-2.0, -0.3, 0.4, 1.5}) expect_near(psi(x), std::exp(-2.0 * std::abs(x)), 1e-14);

  const auto delta = eigenfunction_origin({1.0, 0.0, -2.0, 1.0}, cplx(0, 1));
  for (double x : {-2.0, -0.3, 0.4, 1.5}) expect_near(delta(x), std::exp(-std::abs(x)), 1e-15);
  EXPECT_LT(eigen_residual(delta, ConnectedOrigin{{1.0, 0.0, -2.0, 1.0}}, -1.0), 1e-15);

  try {
    eigenfunction_origin(BoundaryMatrix2::identity(), cplx(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnEigenvalue);
  }
  EXPECT_THROW(eigenfunction_origin({1.0, 0.0, -2.0, 1.0}, cplx(0, -1)), Error);
}

TEST(EigenfunctionOrigin, EveryEigenvalueOfRandomSpecs) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const BoundaryMatrix2 B = matrix_from_type_I(random_type_I(rng));
    const ConnectedOrigin spec{B};
    for (const auto& e : compute_spectrum(spec).eigenvalues) {
      if (e.k.k.imag() < 1e-3) continue;  // barely bound: root accuracy dominates
      const auto psi = eigenfunction_origin(B, e.k.k);
      EXPECT_LT(eigen_residual(psi, spec, e.lambda), 1e-8);
      ++checked;
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(EigenfunctionSeparated, Basis) {
  const TypeIIParams p = TypeIIParams::make(0, 1, -1);
  const auto basis = eigenfunction_separated(p, cplx(0, 1));
  ASSERT_EQ(basis.size(), 2u);
  for (const auto& psi : basis) EXPECT_LT(eigen_residual(psi, SeparatedOrigin{p}, -1.0), 1e-14);

  const TypeIIParams q = TypeIIParams::make(pi / 4, 1, -1);
  const auto one = eigenfunction_separated(q, kI * std::polar(1.0, pi / 4));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_LT(eigen_residual(one[0], SeparatedOrigin{q}, cplx(0, -1)), 1e-14);
  EXPECT_THROW(eigenfunction_separated(q, cplx(0, 1)), Error);
}

TEST(EigenfunctionTwoPoint, TextbookDoubleWell) {
  const BoundaryMatrix2 B{1.0, 0.0, -2.0, 1.0};
  const TwoPoint spec{1.0, B};
  for (double kappa : {0.79681213002002005, 1.1088575528785451}) {
    const auto psi = eigenfunction_two_point(B, 1.0, cplx(0, kappa));
    EXPECT_LT(eigen_residual(psi, spec, -kappa * kappa), 1e-8);
    EXPECT_LT(pt_symmetry_defect(psi), 1e-8);
  }
  // the even state is positive and symmetric
  const auto even = eigenfunction_two_point(B, 1.0, cplx(0, 1.1088575528785451));
  expect_near(even(0.3), even(-0.3), 1e-12);
  const auto odd = eigenfunction_two_point(B, 1.0, cplx(0, 0.79681213002002005));
  expect_near(odd(0.3), -odd(-0.3), 1e-12);
}

TEST(EigenfunctionTwoPoint, NormalizedOnLeftPiece) {
  const BoundaryMatrix2 B{1.0, 0.0, -2.0, 1.0};
  const auto psi = eigenfunction_two_point(B, 1.0, cplx(0, 1.1088575528785451));
  expect_near(psi.limit(-1.0, -1).first, 1.0, 1e-14);
}

TEST(EigenfunctionTwoPoint, DeltaPairRootOfPrintedRelationIsNotAnEigenvalue) {
  // k = i zeros the printed two-point relation, but the matching system stays regular there
  try {
    eigenfunction_two_point(delta_pair_matrix(0, 2), 1.0, cplx(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnEigenvalue);
  }
  EXPECT_GT(std::abs(two_point_determinant(delta_pair_matrix(0, 2), 1.0, cplx(0, 1))), 1.0);
}

TEST(EigenfunctionTwoPoint, IdentityHasNone) {
  for (cplx k : {cplx(0, 1), cplx(0.5, 0.2), cplx(-2.0, 3.0)})
    EXPECT_THROW(eigenfunction_two_point(BoundaryMatrix2::identity(), 1.0, k), Error);
}

TEST(EigenfunctionTwoPoint, DeterminantZerosGiveEigenfunctions) {
  std::mt19937_64 rng(42);
  const SpectrumOptions opt{kDefaultTol, std::nullopt, DispersionForm::Determinant};
  int real_checked = 0, pair_checked = 0;
  for (int i = 0; i < 60; ++i) {
    const BoundaryMatrix2 B = matrix_from_type_I(random_type_I(rng));
    const TwoPoint spec{0.5 + 0.05 * i, B};
    const auto eig = compute_spectrum(spec, opt).eigenvalues;
    for (const auto& e : eig) {
      if (e.k.k.imag() < 1e-2 || e.multiplicity != 1) continue;
      // near an exceptional point the eigenvector is ill-conditioned
      double gap = 1e300;
      for (const auto& o : eig)
        if (&o != &e) gap = std::min(gap, std::abs(o.k.k - e.k.k));
      if (gap < 1e-3) continue;
      const auto psi = eigenfunction_two_point(B, spec.l, e.k.k);
      EXPECT_LT(eigen_residual(psi, spec, e.lambda), 1e-8);
      const auto partner = pt_apply(psi);
      EXPECT_LT(eigen_residual(partner, spec, std::conj(e.lambda)), 1e-8);
      if (e.kind == EigenKind::NegativeReal) {
        EXPECT_LT(pt_symmetry_defect(psi), 1e-8);
        ++real_checked;
      } else {
        EXPECT_GT(pt_symmetry_defect(psi), 0.1);
        ++pair_checked;
      }
    }
  }
  EXPECT_GT(real_checked, 10);
  EXPECT_GT(pair_checked, 10);
}

TEST(PtApply, PiecewiseExp) {
  const auto psi = eigenfunction_origin({1.0, 0.0, -2.0, 1.0}, cplx(0, 1));
  const auto pt = pt_apply(psi);
  for (double x : {-1.3, -0.2, 0.7}) expect_near(pt(x), psi(x), 1e-15);

  const double inf = std::numeric_limits<double>::infinity();
  const PiecewiseExp f{{Piece{-inf, 0.5, 0.5, {{cplx(1, 2), cplx(1, 3)}}},
                        Piece{0.5, inf, 0.5, {{cplx(-1, 1), cplx(-2, 0.5)}, {cplx(0.2, 0), cplx(-1, -1)}}}}};
  const auto g = pt_apply(f);
  const auto gg = pt_apply(g);
  for (double x : {-2.0, -0.4, 0.1, 0.6, 3.0}) {
    expect_near(g(x), std::conj(f(-x)), 1e-13);
    expect_near(gg(x), f(x), 1e-13);
  }
}

TEST(PtApply, GridFunction) {
  const auto e = GridFunction::sample(3.0, 64, [](double x) { return std::exp(kI * x); });
  const auto pe = pt_apply(e);
  for (int j = 0; j < 64; ++j) expect_near(pe.values[j], e.values[j], 1e-15);

  std::mt19937_64 rng(43);
  std::normal_distribution<double> g;
  GridFunction r{2.0, 32, 0.5, std::vector<cplx>(32)};
  for (auto& v : r.values) v = {g(rng), g(rng)};
  const auto rr = pt_apply(pt_apply(r));
  EXPECT_EQ(rr.values, r.values);

  GridFunction shifted = r;
  shifted.offset = 0.25;
  try {
    pt_apply(shifted);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::AsymmetricGrid);
  }
}

TEST(PtSymmetryDefect, Examples) {
  const double inf = std::numeric_limits<double>::infinity();
  const PiecewiseExp even{{Piece{-inf, 0.0, 0.0, {{1.0, 1.0}}}, Piece{0.0, inf, 0.0, {{1.0, -1.0}}}}};
  EXPECT_LT(pt_symmetry_defect(even), 1e-14);
  // a unimodular phase does not count as a defect
  const PiecewiseExp phased{{Piece{-inf, 0.0, 0.0, {{kI, 1.0}}}, Piece{0.0, inf, 0.0, {{kI, -1.0}}}}};
  EXPECT_LT(pt_symmetry_defect(phased), 1e-14);
  // e^{-|x|} on the left only against its mirror image: orthogonal, defect sqrt(2)
  const PiecewiseExp left{{Piece{-inf, 0.0, 0.0, {{1.0, 1.0}}}, Piece{0.0, inf, 0.0, {{1e-300, -1.0}}}}};
  EXPECT_NEAR(pt_symmetry_defect(left), std::sqrt(2.0), 1e-6);
}

TEST(PtSymmetryDefect, OriginEigenfunctions) {
  std::mt19937_64 rng(44);
  int real_checked = 0, pair_checked = 0;
  for (int i = 0; i < 3000 && (real_checked < 50 || pair_checked < 20); ++i) {
    const BoundaryMatrix2 B = matrix_from_type_I(random_type_I(rng));
    const ConnectedOrigin spec{B};
    for (const auto& e : compute_spectrum(spec).eigenvalues) {
      if (e.k.k.imag() < 1e-2) continue;
      const auto psi = eigenfunction_origin(B, e.k.k);
      if (e.kind == EigenKind::NegativeReal) {
        EXPECT_LT(pt_symmetry_defect(psi), 1e-8);
        ++real_checked;
      } else {
        EXPECT_GT(pt_symmetry_defect(psi), 0.1);
        EXPECT_LT(eigen_residual(pt_apply(psi), spec, std::conj(e.lambda)), 1e-8);
        ++pair_checked;
      }
    }
  }
  EXPECT_GE(real_checked, 50);
  EXPECT_GE(pair_checked, 20);
}

TEST(ApplyResolvent, ZeroInZeroOut) {
  const GridFunction F{5.0, 100, 0.5, std::vector<cplx>(100)};
  const auto U = apply_resolvent(ConnectedOrigin{{1.0, 0.0, -2.0, 1.0}}, cplx(1, 1), F);
  for (cplx v : U.values) EXPECT_EQ(v, 0.0);
}

// U is fourth-order accurate once the midpoint sums are end-corrected
TEST(ApplyResolvent, ManufacturedSolutionConnected) {
  for (const BoundaryMatrix2& B : {BoundaryMatrix2::identity(), BoundaryMatrix2{1.0, 0.0, -2.0, 1.0},
                                   matrix_from_type_I({0.4, 2.2, 1.5, 0.8})}) {
    const auto m = manufactured_connected(B);
    const cplx lambda(1, 1);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
      const int N = 200 << level;
      const double e = max_error(ConnectedOrigin{B}, m, lambda, 8.0, N);
      if (level > 0) {
        EXPECT_GT(prev / e, 12.0) << "level " << level;
      }
      prev = e;
    }
    EXPECT_LT(prev, 1e-6);
  }
}

TEST(ApplyResolvent, ManufacturedSolutionSeparated) {
  const TypeIIParams p = TypeIIParams::make(0.7, 1.0, 0.6);
  const cplx ap(0.3, 0.4), am(-0.5, 1.0);
  const Manufactured m{am, -p.h1 * std::polar(1.0, -p.theta) * am / p.h0, ap,
                       p.h1 * std::polar(1.0, p.theta) * ap / p.h0};
  const double e1 = max_error(SeparatedOrigin{p}, m, cplx(-2, 0.5), 8.0, 400);
  const double e2 = max_error(SeparatedOrigin{p}, m, cplx(-2, 0.5), 8.0, 800);
  EXPECT_LT(e2, 1e-6);
  EXPECT_GT(e1 / e2, 12.0);
}

TEST(ApplyResolvent, Errors) {
  const auto F = GridFunction::sample(5.0, 100, [](double x) { return std::exp(-x * x); });
  const ConnectedOrigin delta{{1.0, 0.0, -2.0, 1.0}};
  auto code = [&](auto&& call) {
    try {
      call();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  EXPECT_EQ(code([&] { apply_resolvent(delta, 2.0, F); }), ErrorCode::InvalidRegion);
  EXPECT_EQ(code([&] { apply_resolvent(delta, 0.0, F); }), ErrorCode::InvalidRegion);
  EXPECT_EQ(code([&] { apply_resolvent(delta, -1.0, F); }), ErrorCode::SpectrumPoint);
  EXPECT_EQ(code([&] { apply_resolvent(SeparatedOrigin{TypeIIParams::make(0, 1, -1)}, -1.0, F); }),
            ErrorCode::SpectrumPoint);
  EXPECT_EQ(code([&] { apply_resolvent(DeltaPair{0, 2, 1}, cplx(1, 1), F); }), ErrorCode::InvalidParams);
  GridFunction g = F;
  g.offset = 0.0;
  g.N = 100;
  EXPECT_EQ(code([&] { apply_resolvent(delta, cplx(1, 1), g); }), ErrorCode::GridCollision);
}

TEST(Scattering, Examples) {
  const auto free = scattering_coefficients(BoundaryMatrix2::identity(), 1.7);
  expect_near(free.t_left, 1.0, 1e-15);
  expect_near(free.r_left, 0.0, 1e-15);
  expect_near(free.t_right, 1.0, 1e-15);
  expect_near(free.r_right, 0.0, 1e-15);

  const auto delta = scattering_coefficients({1.0, 0.0, -2.0, 1.0}, 1.0);
  expect_near(delta.t_left, cplx(0.5, 0.5), 1e-15);
  expect_near(delta.t_right, cplx(0.5, 0.5), 1e-15);
  EXPECT_NEAR(std::norm(delta.t_left), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(delta.t_left) + std::norm(delta.r_left), 1.0, 1e-14);
}

// Reference values from a generic 2x2 linear solve of the plane-wave matching equations.
TEST(Scattering, PtConditionsDoNotConserveFlux) {
  const auto s = scattering_coefficients(matrix_from_type_I({0.3, 1.1, 2.0, 0.5}), 1.3);
  expect_near(s.t_left, cplx(0.1742378919519981, 0.7615526884287861), 1e-13);
  expect_near(s.r_left, cplx(1.8609345205727017, -1.0776960289515027), 1e-13);
  expect_near(s.t_right, cplx(0.5738097313098367, 0.5301544421195775), 1e-13);
  expect_near(s.r_right, cplx(0.15680949849048936, -0.09081081142665326), 1e-13);
  EXPECT_NEAR(std::norm(s.t_left) + std::norm(s.r_left), 5.234827360921977, 1e-12);
}

TEST(Scattering, SelfadjointFluxConservation) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ang(0.0, 2 * pi), kd(0.05, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), d = u(rng);
    if (std::abs(b) < 0.05) continue;
    const BoundaryMatrix2 B = BoundaryMatrix2{a, b, (a * d - 1.0) / b, d}.scaled(std::polar(1.0, ang(rng)));
    ASSERT_TRUE(is_selfadjoint_connected(B));
    const double k = kd(rng);
    const auto s = scattering_coefficients(B, k);
    EXPECT_NEAR(std::norm(s.t_left) + std::norm(s.r_left), 1.0, 1e-10);
    EXPECT_NEAR(std::norm(s.t_right) + std::norm(s.r_right), 1.0, 1e-10);
  }
}

TEST(Scattering, ResonantK) {
  // D = k^2 beta - gamma + ik (alpha + delta) vanishes at k = 1 for alpha = delta = 0, beta = gamma = 1
  try {
    scattering_coefficients({0.0, 1.0, 1.0, 0.0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResonantK);
  }
}
