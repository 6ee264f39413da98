#pragma once

// Finite-difference discretization of -d^2/dx^2 on [-L, L] with Dirichlet ends and the
// matching conditions imposed through ghost values. Independent of the dispersion relations.

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "ptpoint/core.hpp"
#include "ptpoint/states.hpp"

namespace ptpoint {

struct OracleConfig {
  double L = 12.0;
  int N = 2400;
  /// Eigenvalues with Re < -drop_tol or |Im| > drop_tol count as discrete-spectrum candidates.
  double drop_tol = 1e-4;

  void validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidParams, "oracle L must be positive");
    if (N < 16 || N % 2 != 0) throw Error(ErrorCode::InvalidParams, "oracle N must be even and >= 16");
    if (!(drop_tol > 0.0)) throw Error(ErrorCode::InvalidParams, "drop_tol must be positive");
  }
};

/// Sparse rows of the discrete operator on the nodes x_j = -L + (j + 1/2) h.
class FdOperator {
 public:
  FdOperator(int n, double h) : h_(h), rows_(n) {}

  int size() const { return static_cast<int>(rows_.size()); }
  double h() const { return h_; }
  std::vector<std::pair<int, cplx>>& row(int i) { return rows_[i]; }
  const std::vector<std::pair<int, cplx>>& row(int i) const { return rows_[i]; }

  std::vector<cplx> apply(const std::vector<cplx>& u) const {
    if (static_cast<int>(u.size()) != size()) throw Error(ErrorCode::GridMismatch, "vector length differs from operator size");
    std::vector<cplx> out(u.size());
    for (int i = 0; i < size(); ++i) {
      cplx s = 0.0;
      for (const auto& [j, w] : rows_[i]) s += w * u[j];
      out[i] = s;
    }
    return out;
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(size(), size());
    for (int i = 0; i < size(); ++i)
      for (const auto& [j, w] : rows_[i]) M(i, j) += w;
    return M;
  }

 private:
  double h_;
  std::vector<std::vector<std::pair<int, cplx>>> rows_;
};

namespace detail {

/// Lagrange weights for value and first derivative at x0 through the given nodes.
template <std::size_t M>
std::pair<std::array<double, M>, std::array<double, M>> lagrange_weights(const std::array<double, M>& xs, double x0) {
  std::array<double, M> w{}, dw{};
  for (std::size_t i = 0; i < M; ++i) {
    double num = 1.0, den = 1.0;
    for (std::size_t j = 0; j < M; ++j) {
      if (j == i) continue;
      num *= x0 - xs[j];
      den *= xs[i] - xs[j];
    }
    // product rule for d/dx prod_{j != i} (x - x_j)
    double dprod = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      if (m == i) continue;
      double t = 1.0;
      for (std::size_t j = 0; j < M; ++j)
        if (j != i && j != m) t *= x0 - xs[j];
      dprod += t;
    }
    w[i] = num / den;
    dw[i] = dprod / den;
  }
  return {w, dw};
}

/// Replaces rows m-1 and m by the difference rows whose ghost values gL (left function at x_m)
/// and gR (right function at x_{m-1}) are eliminated through the matching conditions Q.
inline void impose_interface(FdOperator& op, double L, const Interface& itf, int m) {
  const double h = op.h();
  auto xn = [&](int j) { return -L + (j + 0.5) * h; };
  // left values from x_{m-3}, x_{m-2}, x_{m-1} and the ghost at x_m
  const auto [wl, dwl] = lagrange_weights<4>({xn(m - 3), xn(m - 2), xn(m - 1), xn(m)}, itf.x);
  // right values from the ghost at x_{m-1} and x_m, x_{m+1}, x_{m+2}
  const auto [wr, dwr] = lagrange_weights<4>({xn(m - 1), xn(m), xn(m + 1), xn(m + 2)}, itf.x);

  // v = Au * (u_{m-3}, ..., u_{m+2}) + Ag * (gL, gR),  v = (psi+, psi+', psi-, psi-')
  Eigen::Matrix<cplx, 4, 6> Au = Eigen::Matrix<cplx, 4, 6>::Zero();
  Eigen::Matrix<cplx, 4, 2> Ag = Eigen::Matrix<cplx, 4, 2>::Zero();
  for (int i = 0; i < 3; ++i) {
    Au(0, 3 + i) = wr[1 + i];
    Au(1, 3 + i) = dwr[1 + i];
    Au(2, i) = wl[i];
    Au(3, i) = dwl[i];
  }
  Ag(0, 1) = wr[0];
  Ag(1, 1) = dwr[0];
  Ag(2, 0) = wl[3];
  Ag(3, 0) = dwl[3];

  Eigen::Matrix<cplx, 2, 4> Q;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) Q(r, c) = itf.Q[r][c];
  const Eigen::Matrix2cd QAg = Q * Ag;
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(QAg);
  if (!(svd.singularValues()(1) > 1e-12 * svd.singularValues()(0))) {
    throw Error(ErrorCode::GridCollision, "ghost values cannot be eliminated at x = " + std::to_string(itf.x));
  }
  const Eigen::Matrix<cplx, 2, 6> G = -QAg.inverse() * (Q * Au);

  const double ih2 = 1.0 / (h * h);
  auto& left = op.row(m - 1);
  left.clear();
  left.push_back({m - 2, -ih2});
  left.push_back({m - 1, 2.0 * ih2});
  auto& right = op.row(m);
  right.clear();
  right.push_back({m, 2.0 * ih2});
  right.push_back({m + 1, -ih2});
  for (int c = 0; c < 6; ++c) {
    left.push_back({m - 3 + c, -ih2 * G(0, c)});
    right.push_back({m - 3 + c, -ih2 * G(1, c)});
  }
}

}  // namespace detail

inline FdOperator discretize_operator(const InteractionSpec& spec, const OracleConfig& cfg) {
  cfg.validate();
  validate(spec);
  const int N = cfg.N;
  const double h = 2.0 * cfg.L / N;
  const double ih2 = 1.0 / (h * h);
  FdOperator op(N, h);
  for (int i = 0; i < N; ++i) {
    auto& r = op.row(i);
    if (i > 0) r.push_back({i - 1, -ih2});
    // Dirichlet walls sit half a cell outside the end nodes: ghost u = -u_end.
    r.push_back({i, (i == 0 || i == N - 1 ? 3.0 : 2.0) * ih2});
    if (i < N - 1) r.push_back({i + 1, -ih2});
  }
  int previous_m = -1000;
  for (const auto& itf : interfaces_of(spec)) {
    const double s = (itf.x + cfg.L) / h - 0.5;  // fractional node index of the interface
    const int m = static_cast<int>(std::ceil(s));
    if (std::abs(s - std::round(s)) < 0.25) {
      throw Error(ErrorCode::GridCollision, "grid node within h/4 of interface at x = " + std::to_string(itf.x));
    }
    if (m - 3 < 0 || m + 2 > N - 1) {
      throw Error(ErrorCode::GridCollision, "interface stencil leaves the domain at x = " + std::to_string(itf.x));
    }
    if (m - previous_m < 3) {
      throw Error(ErrorCode::GridCollision, "interface stencils overlap; refine the grid");
    }
    detail::impose_interface(op, cfg.L, itf, m);
    previous_m = m;
  }
  return op;
}

inline Eigen::MatrixXcd discretize(const InteractionSpec& spec, const OracleConfig& cfg) {
  return discretize_operator(spec, cfg).to_dense();
}

/// All eigenvalues of a dense complex matrix (LAPACK zgeev, no eigenvectors).
inline std::vector<cplx> dense_eigenvalues(Eigen::MatrixXcd A) {
  const int n = static_cast<int>(A.rows());
  std::vector<cplx> w(n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(A.data()), n,
                    reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) throw Error(ErrorCode::EigensolverFailure, "zgeev returned info = " + std::to_string(info));
  return w;
}

/// Discrete-spectrum candidates of the finite-difference operator, sorted by (Re, Im).
inline std::vector<cplx> oracle_discrete_spectrum(const InteractionSpec& spec, const OracleConfig& cfg = {}) {
  const std::vector<cplx> all = dense_eigenvalues(discretize(spec, cfg));
  std::vector<cplx> out;
  for (cplx z : all)
    if (z.real() < -cfg.drop_tol || std::abs(z.imag()) > cfg.drop_tol) out.push_back(z);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

/// ||M U - lambda U - F|| / ||F|| with M the finite-difference operator on the grid of U.
inline double oracle_resolvent_residual(const InteractionSpec& spec, cplx lambda, const GridFunction& U,
                                        const GridFunction& F) {
  U.validate();
  F.validate();
  if (!U.same_grid(F) || U.values.size() != F.values.size() || static_cast<int>(U.values.size()) != U.N) {
    throw Error(ErrorCode::GridMismatch, "U and F live on different grids");
  }
  if (std::abs(U.offset - 0.5) > 1e-12) throw Error(ErrorCode::GridMismatch, "oracle grid is cell-centred");
  const FdOperator op = discretize_operator(spec, OracleConfig{U.L, U.N, 1e-4});
  const std::vector<cplx> MU = op.apply(U.values);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < MU.size(); ++j) {
    num += std::norm(MU[j] - lambda * U.values[j] - F.values[j]);
    den += std::norm(F.values[j]);
  }
  if (!(den > 0.0)) throw Error(ErrorCode::InvalidParams, "F vanishes");
  return std::sqrt(num / den);
}

}  // namespace ptpoint
