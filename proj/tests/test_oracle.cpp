#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "ptpoint/oracle.hpp"

using namespace ptpoint;
using std::numbers::pi;

namespace {

const BoundaryMatrix2 kDelta{1.0, 0.0, -2.0, 1.0};

double nearest(const std::vector<cplx>& zs, cplx z) {
  double best = 1e300;
  for (cplx w : zs) best = std::min(best, std::abs(w - z));
  return best;
}

int count_below(const std::vector<cplx>& zs, double re) {
  return static_cast<int>(std::count_if(zs.begin(), zs.end(), [re](cplx z) { return z.real() < re; }));
}

ErrorCode code_of(auto&& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Discretize, FreeOperatorIsDirichletLaplacian) {
  const OracleConfig cfg{6.0, 300, 1e-4};
  const Eigen::MatrixXcd M = discretize(ConnectedOrigin{BoundaryMatrix2::identity()}, cfg);
  ASSERT_EQ(M.rows(), 300);
  auto ev = dense_eigenvalues(M);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (int n = 1; n <= 4; ++n) {
    const double exact = std::pow(n * pi / (2.0 * cfg.L), 2);
    EXPECT_NEAR(ev[n - 1].real(), exact, 1e-3 * exact);
    EXPECT_NEAR(ev[n - 1].imag(), 0.0, 1e-8);
  }
}

TEST(Discretize, SelfadjointDeviationConfinedToInterfaceRows) {
  const OracleConfig cfg{5.0, 200, 1e-4};
  const Eigen::MatrixXcd M = discretize(ConnectedOrigin{BoundaryMatrix2{2.0, 0.5, 1.0, 0.75}}, cfg);
  const Eigen::MatrixXcd D = M - M.adjoint();
  for (int i = 0; i < cfg.N; ++i)
    for (int j = 0; j < cfg.N; ++j)
      if (std::abs(D(i, j)) > 1e-9) {
        // interface at x = 0 sits between nodes 99 and 100; the stencils reach 97..102
        EXPECT_TRUE((i >= 97 && i <= 102) || (j >= 97 && j <= 102)) << i << "," << j;
      }
}

TEST(Discretize, GridCollision) {
  // with odd N a node sits on the origin
  EXPECT_EQ(code_of([] { discretize(ConnectedOrigin{kDelta}, OracleConfig{5.0, 201, 1e-4}); }),
            ErrorCode::InvalidParams);
  // h = 0.04 puts node 150 exactly on x = 1.02
  EXPECT_EQ(code_of([] { discretize(TwoPoint{1.02, kDelta}, OracleConfig{5.0, 250, 1e-4}); }),
            ErrorCode::GridCollision);
}

TEST(OracleSpectrum, DeltaWell) {
  const auto ev = oracle_discrete_spectrum(ConnectedOrigin{kDelta}, OracleConfig{10.0, 1000, 1e-4});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_NEAR(ev[0].real(), -1.0, 1e-3);
  EXPECT_NEAR(ev[0].imag(), 0.0, 1e-9);
}

TEST(OracleSpectrum, FreeOperatorIsEmpty) {
  EXPECT_TRUE(oracle_discrete_spectrum(ConnectedOrigin{BoundaryMatrix2::identity()}, OracleConfig{8.0, 600, 1e-4}).empty());
}

TEST(OracleSpectrum, SeparatedTwoFoldCluster) {
  const auto ev = oracle_discrete_spectrum(SeparatedOrigin{TypeIIParams::make(0, 1, -1)}, OracleConfig{10.0, 1000, 1e-4});
  ASSERT_EQ(ev.size(), 2u);
  for (cplx z : ev) EXPECT_NEAR(std::abs(z + 1.0), 0.0, 1e-3);
}

TEST(OracleSpectrum, ComplexPairOfTypeI) {
  const TypeIParams p{0.0, 2.0 * pi / 3.0, 1.0, 4.0};
  const auto closed = compute_spectrum(ConnectedOrigin{matrix_from_type_I(p)});
  ASSERT_FALSE(closed.all_real);
  const auto ev = oracle_discrete_spectrum(ConnectedOrigin{matrix_from_type_I(p)}, OracleConfig{10.0, 1000, 1e-4});
  // the box continuum also leaves slightly complex values near the positive axis; keep |Im| > 1
  std::vector<cplx> pair;
  for (cplx z : ev)
    if (std::abs(z.imag()) > 1.0) pair.push_back(z);
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_NEAR(std::abs(pair[0] - std::conj(pair[1])), 0.0, 1e-8);
  for (const auto& e : closed.eigenvalues) EXPECT_LT(nearest(pair, e.lambda), 1e-2);
}

TEST(OracleSpectrum, SecondOrderConvergence) {
  const double L = 10.0;
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int N = 250 << level;
    const auto ev = oracle_discrete_spectrum(ConnectedOrigin{kDelta}, OracleConfig{L, N, 1e-4});
    ASSERT_EQ(ev.size(), 1u);
    const double err = std::abs(ev[0] + 1.0);
    if (level > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.5) << "N = " << N;
    }
    prev = err;
  }
}

TEST(OracleSpectrum, MatchesClosedFormForRandomRealTypeI) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi), u(0.0, 1.0);
  const OracleConfig cfg{8.0, 640, 1e-4};
  const double h = 2.0 * cfg.L / cfg.N;
  int tested = 0;
  while (tested < 50) {
    TypeIParams p{ang(rng), ang(rng), 0.2 + 2.8 * u(rng), 0.0};
    p.c = -1.0 / p.b + (3.0 + 1.0 / p.b) * u(rng);
    if (!real_spectrum_predicate_type_I(p).is_real) continue;
    const auto closed = compute_spectrum(ConnectedOrigin{matrix_from_type_I(p)});
    // the Dirichlet box needs bound states that fit well inside it
    bool well_localized = true;
    for (const auto& e : closed.eigenvalues)
      if (e.k.k.imag() < 0.5 || e.k.k.imag() > 8.0) well_localized = false;
    if (!well_localized) continue;
    ++tested;
    const auto ev = oracle_discrete_spectrum(ConnectedOrigin{matrix_from_type_I(p)}, cfg);
    for (const auto& e : closed.eigenvalues) {
      const double tol = std::max(1e-2, 10.0 * h * h * std::abs(e.lambda));
      EXPECT_LT(nearest(ev, e.lambda), tol) << "b=" << p.b << " c=" << p.c << " phi=" << p.phi;
    }
    EXPECT_EQ(count_below(ev, -cfg.drop_tol), static_cast<int>(closed.eigenvalues.size()))
        << "b=" << p.b << " c=" << p.c << " phi=" << p.phi;
  }
}

TEST(OracleSpectrum, TwoPointTextbookDoubleWell) {
  const auto ev = oracle_discrete_spectrum(TwoPoint{1.0, kDelta}, OracleConfig{10.0, 1000, 1e-4});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), -std::pow(1.1088575528785451, 2), 2e-3);
  EXPECT_NEAR(ev[1].real(), -std::pow(0.79681213002002005, 2), 2e-3);
}

TEST(OracleSpectrum, DeltaPairZeroTwoHasNoBoundState) {
  // the printed two-point relation has the root k = i here; the operator itself does not
  const auto ev = oracle_discrete_spectrum(DeltaPair{0.0, 2.0, 1.0}, OracleConfig{10.0, 1000, 1e-4});
  EXPECT_EQ(count_below(ev, -1e-2), 0);
  EXPECT_GT(nearest(ev, -1.0), 0.1);
}

TEST(OracleResolventResidual, ZeroSolutionGivesOne) {
  const auto F = GridFunction::sample(5.0, 200, [](double x) { return std::exp(-x * x); });
  GridFunction U = F;
  std::fill(U.values.begin(), U.values.end(), 0.0);
  EXPECT_DOUBLE_EQ(oracle_resolvent_residual(ConnectedOrigin{kDelta}, cplx(1, 1), U, F), 1.0);
}

TEST(OracleResolventResidual, FreeResolventIsSmall) {
  const ConnectedOrigin free{BoundaryMatrix2::identity()};
  // h = 0.01; L large enough that the Dirichlet walls see e^{-Im k L} ~ 1e-12
  const auto F = GridFunction::sample(60.0, 12000, [](double x) { return std::exp(-x * x); });
  const auto U = apply_resolvent(free, cplx(1, 1), F);
  EXPECT_LT(oracle_resolvent_residual(free, cplx(1, 1), U, F), 1e-4);
}

TEST(OracleResolventResidual, GridMismatch) {
  const auto F = GridFunction::sample(5.0, 200, [](double x) { return std::exp(-x * x); });
  const auto G = GridFunction::sample(5.0, 400, [](double x) { return std::exp(-x * x); });
  EXPECT_EQ(code_of([&] { oracle_resolvent_residual(ConnectedOrigin{kDelta}, cplx(1, 1), G, F); }),
            ErrorCode::GridMismatch);
}

TEST(OracleConfig, Validation) {
  EXPECT_EQ(code_of([] { OracleConfig{-1.0, 200, 1e-4}.validate(); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { OracleConfig{5.0, 8, 1e-4}.validate(); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { OracleConfig{5.0, 200, 0.0}.validate(); }), ErrorCode::InvalidParams);
}
