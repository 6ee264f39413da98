#pragma once

// Eigenfunctions as exact piecewise exponentials, resolvent application on a grid,
// PT action on functions, and plane-wave scattering for connected conditions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ptpoint/core.hpp"
#include "ptpoint/spectral.hpp"

namespace ptpoint {

/// coeff * exp(exponent * (x - anchor)) on the enclosing piece.
struct ExpTerm {
  cplx coeff;
  cplx exponent;
};

struct Piece {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double anchor = 0.0;
  std::vector<ExpTerm> terms;

  cplx value(double x) const {
    cplx s = 0.0;
    for (const auto& t : terms) s += t.coeff * std::exp(t.exponent * (x - anchor));
    return s;
  }
  cplx derivative(double x) const {
    cplx s = 0.0;
    for (const auto& t : terms) s += t.coeff * t.exponent * std::exp(t.exponent * (x - anchor));
    return s;
  }
};

/// Function given exactly by finite sums of exponentials on consecutive intervals.
struct PiecewiseExp {
  std::vector<Piece> pieces;

  /// Piece containing x; at a breakpoint the piece to the right is used.
  const Piece& piece_at(double x) const {
    for (const auto& p : pieces)
      if (x >= p.lo && x < p.hi) return p;
    return x < pieces.front().lo ? pieces.front() : pieces.back();
  }
  cplx operator()(double x) const { return piece_at(x).value(x); }
  cplx derivative(double x) const { return piece_at(x).derivative(x); }

  /// One-sided value and derivative at a breakpoint x0, from the left (side < 0) or right.
  std::pair<cplx, cplx> limit(double x0, int side) const {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Piece& p = pieces[i];
      if ((side < 0 && p.hi == x0) || (side > 0 && p.lo == x0)) return {p.value(x0), p.derivative(x0)};
    }
    throw Error(ErrorCode::InvalidParams, "no breakpoint at requested point");
  }

  /// True when every term on an unbounded piece decays towards infinity.
  bool square_integrable() const {
    for (const auto& p : pieces) {
      for (const auto& t : p.terms) {
        if (t.coeff == 0.0) continue;
        if (std::isinf(p.hi) && !(t.exponent.real() < 0.0)) return false;
        if (std::isinf(p.lo) && !(t.exponent.real() > 0.0)) return false;
      }
    }
    return true;
  }
};

/// Samples on the cell-centred grid x_j = -L + (j + offset) h, h = 2L / N.
struct GridFunction {
  double L = 1.0;
  int N = 16;
  double offset = 0.5;
  std::vector<cplx> values;

  double h() const { return 2.0 * L / N; }
  double x(int j) const { return -L + (j + offset) * h(); }

  static GridFunction sample(double L, int N, const auto& f) {
    GridFunction g{L, N, 0.5, {}};
    g.validate();
    g.values.resize(N);
    for (int j = 0; j < N; ++j) g.values[j] = f(g.x(j));
    return g;
  }

  void validate() const {
    if (N < 16) throw Error(ErrorCode::InvalidParams, "grid needs N >= 16");
    if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidParams, "grid half-width L must be positive");
    if (!values.empty() && static_cast<int>(values.size()) != N)
      throw Error(ErrorCode::GridMismatch, "value count differs from N");
  }
  bool same_grid(const GridFunction& o) const { return L == o.L && N == o.N && offset == o.offset; }
};

struct ScatteringData {
  cplx t_left, r_left, t_right, r_right;
};

/// Matching conditions Q (psi(x0+), psi'(x0+), psi(x0-), psi'(x0-))^T = 0 at one point.
struct Interface {
  double x = 0.0;
  QMatrix Q{};
};

/// Q for (psi(x0-), psi'(x0-)) = M (psi(x0+), psi'(x0+)), the condition at -l.
inline QMatrix q_left_from_right(const BoundaryMatrix2& M) {
  return {{{-M.alpha, -M.beta, 1.0, 0.0}, {-M.gamma, -M.delta, 0.0, 1.0}}};
}

inline std::vector<Interface> interfaces_of(const InteractionSpec& spec) {
  if (const auto* s = std::get_if<ConnectedOrigin>(&spec)) return {{0.0, q_from_connected(s->B)}};
  if (const auto* s = std::get_if<SeparatedOrigin>(&spec)) return {{0.0, q_from_separated(s->p)}};
  const double l = std::holds_alternative<TwoPoint>(spec) ? std::get<TwoPoint>(spec).l
                                                          : std::get<DeltaPair>(spec).l;
  const BoundaryMatrix2 B = std::holds_alternative<TwoPoint>(spec)
                                ? interface_matrix(std::get<TwoPoint>(spec))
                                : interface_matrix(std::get<DeltaPair>(spec));
  return {{-l, q_left_from_right(B.pt_mirror())}, {l, q_from_connected(B)}};
}

/// |Q v| relative to |Q| |v| for the one-sided boundary values of psi at x0.
inline double interface_residual(const PiecewiseExp& psi, const Interface& itf) {
  const auto [vp, dp] = psi.limit(itf.x, +1);
  const auto [vm, dm] = psi.limit(itf.x, -1);
  const std::array<cplx, 4> v{vp, dp, vm, dm};
  double qmax = 0.0, vmax = 0.0, r = 0.0;
  for (const auto& row : itf.Q) {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) {
      s += row[i] * v[i];
      qmax = std::max(qmax, std::abs(row[i]));
    }
    r = std::max(r, std::abs(s));
  }
  for (cplx z : v) vmax = std::max(vmax, std::abs(z));
  return r / std::max(1e-300, qmax * vmax);
}

/// Largest relative violation of exponent^2 = -lambda, i.e. of -psi'' = lambda psi on every piece.
inline double ode_residual(const PiecewiseExp& psi, cplx lambda) {
  double r = 0.0;
  for (const auto& p : psi.pieces)
    for (const auto& t : p.terms)
      if (t.coeff != 0.0) r = std::max(r, std::abs(t.exponent * t.exponent + lambda) / std::max(1.0, std::abs(lambda)));
  return r;
}

/// Combined eigenfunction check: ODE per piece, all matching conditions, square integrability.
inline double eigen_residual(const PiecewiseExp& psi, const InteractionSpec& spec, cplx lambda) {
  if (!psi.square_integrable()) return std::numeric_limits<double>::infinity();
  double r = ode_residual(psi, lambda);
  for (const auto& itf : interfaces_of(spec)) r = std::max(r, interface_residual(psi, itf));
  return r;
}

// ---------------------------------------------------------------------------
// Eigenfunctions

/// psi = e^{-ikx} for x < 0 and (alpha - ik beta) e^{ikx} for x > 0.
inline PiecewiseExp eigenfunction_origin(const BoundaryMatrix2& B, cplx k, double tol = 1e-8) {
  detail::require_nondegenerate(B, kDefaultTol);
  if (!(k.imag() > 0.0)) throw Error(ErrorCode::NotAnEigenvalue, "Im k must be positive");
  const cplx a = B.alpha - kI * k * B.beta;
  const cplx mismatch = kI * k * a - (B.gamma - kI * k * B.delta);
  const double scale = std::max({1.0, std::norm(k) * std::abs(B.beta), std::abs(k) * std::abs(B.trace()),
                                 std::abs(B.gamma)});
  if (std::abs(mismatch) > tol * scale) {
    throw Error(ErrorCode::NotAnEigenvalue, "matching system has no nontrivial kernel at this k");
  }
  const double inf = std::numeric_limits<double>::infinity();
  return {{Piece{-inf, 0.0, 0.0, {{1.0, -kI * k}}}, Piece{0.0, inf, 0.0, {{a, kI * k}}}}};
}

/// Basis of the eigenspace of separated conditions at k: one function per half-line whose
/// condition admits the decaying exponential.
inline std::vector<PiecewiseExp> eigenfunction_separated(const TypeIIParams& p, cplx k, double tol = 1e-8) {
  if (!(k.imag() > 0.0)) throw Error(ErrorCode::NotAnEigenvalue, "Im k must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  const cplx e = std::polar(1.0, p.theta);
  const double scale = std::max({1.0, std::abs(p.h0 * k), std::abs(p.h1)});
  std::vector<PiecewiseExp> out;
  // h0 psi'(+0) = h1 e^{i theta} psi(+0) with psi = e^{ikx}
  if (std::abs(p.h0 * kI * k - p.h1 * e) <= tol * scale)
    out.push_back({{Piece{-inf, 0.0, 0.0, {}}, Piece{0.0, inf, 0.0, {{1.0, kI * k}}}}});
  // h0 psi'(-0) = -h1 e^{-i theta} psi(-0) with psi = e^{-ikx}
  if (std::abs(-p.h0 * kI * k + p.h1 * std::conj(e)) <= tol * scale)
    out.push_back({{Piece{-inf, 0.0, 0.0, {{1.0, -kI * k}}}, Piece{0.0, inf, 0.0, {}}}});
  if (out.empty()) throw Error(ErrorCode::NotAnEigenvalue, "neither half-line condition holds at this k");
  return out;
}

/// Matching system for (c1, c2, c3, c4) with psi = c1 e^{-ik(x+l)}, c2 cos k(x+l) + c3 sin k(x+l),
/// c4 e^{ik(x-l)} on (-inf, -l), (-l, l), (l, inf).
inline Eigen::Matrix4cd two_point_system(const BoundaryMatrix2& B, double l, cplx k) {
  const cplx a = B.alpha, b = B.beta, g = B.gamma, d = B.delta;
  const cplx C = std::cos(2.0 * k * l), S = std::sin(2.0 * k * l);
  Eigen::Matrix4cd M;
  M << 1.0, -std::conj(a), std::conj(b) * k, 0.0,
      kI * k, -std::conj(g), std::conj(d) * k, 0.0,
      0.0, a * C - b * k * S, a * S + b * k * C, -1.0,
      0.0, g * C - d * k * S, g * S + d * k * C, -kI * k;
  return M;
}

inline cplx two_point_determinant(const BoundaryMatrix2& B, double l, cplx k) {
  return two_point_system(B, l, k).determinant();
}

inline PiecewiseExp eigenfunction_two_point(const BoundaryMatrix2& B, double l, cplx k, double tol = 1e-8) {
  if (!(l > 0.0)) throw Error(ErrorCode::InvalidParams, "l must be positive");
  if (!(k.imag() > 0.0)) throw Error(ErrorCode::NotAnEigenvalue, "Im k must be positive");
  const Eigen::Matrix4cd M = two_point_system(B, l, k);
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(3) <= tol * sv(0))) {
    throw Error(ErrorCode::NotAnEigenvalue, "4x4 matching system is nonsingular at this k (smallest singular value " +
                                                std::to_string(sv(3) / sv(0)) + " relative)");
  }
  Eigen::Vector4cd c = svd.matrixV().col(3);
  int pivot = 0;
  if (std::abs(c(0)) <= 1e-12 * c.norm()) c.cwiseAbs().maxCoeff(&pivot);
  c /= c(pivot);
  const double inf = std::numeric_limits<double>::infinity();
  PiecewiseExp psi;
  psi.pieces.push_back({-inf, -l, -l, {{c(0), -kI * k}}});
  psi.pieces.push_back({-l, l, -l, {{0.5 * (c(1) - kI * c(2)), kI * k}, {0.5 * (c(1) + kI * c(2)), -kI * k}}});
  psi.pieces.push_back({l, inf, l, {{c(3), kI * k}}});
  return psi;
}

// ---------------------------------------------------------------------------
// PT action

/// (PT f)(x) = conj(f(-x)).
inline PiecewiseExp pt_apply(const PiecewiseExp& f) {
  PiecewiseExp out;
  for (auto it = f.pieces.rbegin(); it != f.pieces.rend(); ++it) {
    Piece p{-it->hi, -it->lo, -it->anchor, {}};
    for (const auto& t : it->terms) p.terms.push_back({std::conj(t.coeff), -std::conj(t.exponent)});
    out.pieces.push_back(std::move(p));
  }
  return out;
}

inline GridFunction pt_apply(const GridFunction& f) {
  f.validate();
  if (std::abs(f.offset - 0.5) > 1e-12) {
    throw Error(ErrorCode::AsymmetricGrid, "grid nodes are not symmetric under x -> -x");
  }
  GridFunction out = f;
  const int n = static_cast<int>(f.values.size());
  for (int j = 0; j < n; ++j) out.values[j] = std::conj(f.values[n - 1 - j]);
  return out;
}

/// min over |c| = 1 of ||PT psi - c psi|| / ||psi||, with c = <psi, PT psi> / |<psi, PT psi>| and the
/// norms approximated on sample_count symmetric midpoints of [-X, X].
inline double pt_symmetry_defect(const PiecewiseExp& psi, int sample_count = 4000) {
  if (sample_count < 2) throw Error(ErrorCode::InvalidParams, "sample_count must be >= 2");
  double edge = 0.0, decay = std::numeric_limits<double>::infinity();
  for (const auto& p : psi.pieces) {
    if (std::isfinite(p.lo)) edge = std::max(edge, std::abs(p.lo));
    if (std::isfinite(p.hi)) edge = std::max(edge, std::abs(p.hi));
    if (std::isinf(p.lo) || std::isinf(p.hi))
      for (const auto& t : p.terms)
        if (t.coeff != 0.0) decay = std::min(decay, std::abs(t.exponent.real()));
  }
  const double X = edge + (std::isfinite(decay) && decay > 0.0 ? 20.0 / decay : 1.0);
  const PiecewiseExp pt = pt_apply(psi);
  const double h = 2.0 * X / sample_count;
  std::vector<cplx> f(sample_count), g(sample_count);
  cplx inner = 0.0;
  double norm2 = 0.0;
  for (int j = 0; j < sample_count; ++j) {
    const double x = -X + (j + 0.5) * h;
    f[j] = psi(x);
    g[j] = pt(x);
    inner += std::conj(f[j]) * g[j];
    norm2 += std::norm(f[j]);
  }
  if (!(norm2 > 0.0)) throw Error(ErrorCode::InvalidParams, "function vanishes on the sample grid");
  const cplx c = std::abs(inner) > 0.0 ? inner / std::abs(inner) : cplx(1.0);
  double diff2 = 0.0;
  for (int j = 0; j < sample_count; ++j) diff2 += std::norm(g[j] - c * f[j]);
  return std::sqrt(diff2 / norm2);
}

// ---------------------------------------------------------------------------
// Resolvent

/// k = sqrt(lambda) on the physical sheet Im k > 0.
inline cplx physical_k(cplx lambda) { return kI * std::sqrt(-lambda); }

/// U = (A - lambda)^{-1} F for an origin model, sampled on the grid of F. The free part is the
/// convolution with i e^{ik|x-y|} / (2k), evaluated in O(N) by the midpoint rule with end corrections
/// at the kernel kink and at x = 0, so that U keeps O(h^4) accuracy for F smooth on each half-line.
inline GridFunction apply_resolvent(const InteractionSpec& spec, cplx lambda, const GridFunction& F,
                                    double tol = kDefaultTol) {
  F.validate();
  if (static_cast<int>(F.values.size()) != F.N) throw Error(ErrorCode::GridMismatch, "F has no values");
  if (lambda.real() >= -tol && std::abs(lambda.imag()) <= tol * std::max(1.0, std::abs(lambda))) {
    throw Error(ErrorCode::InvalidRegion, "lambda lies on the continuous spectrum [0, inf)");
  }
  const cplx k = physical_k(lambda);
  const int N = F.N;
  const double h = F.h();
  for (int j = 0; j < N; ++j)
    if (std::abs(F.x(j)) < 0.25 * h) throw Error(ErrorCode::GridCollision, "grid node at the interaction point");

  const cplx G0 = kI / (2.0 * k);
  const cplx step = std::exp(kI * k * h);
  std::vector<cplx> fw(N), lower(N), upper(N);
  for (int j = 0; j < N; ++j) fw[j] = F.values[j] * h;
  cplx acc = 0.0;
  for (int j = 0; j < N; ++j) lower[j] = acc = step * acc + fw[j];
  acc = 0.0;
  for (int j = N; j-- > 0;) upper[j] = acc = step * acc + fw[j];

  // One-sided values and slopes of F at 0 from the three nearest nodes on each side. They feed the
  // Euler-Maclaurin h^2 corrections of the midpoint sums, whose integrands break at y = 0.
  cplx F0p = 0.0, F0m = 0.0, dF0p = 0.0, dF0m = 0.0;
  const bool split = std::abs(F.offset - 0.5) < 1e-12 && N % 2 == 0;
  if (split) {
    const int c = N / 2;
    F0p = (15.0 * F.values[c] - 10.0 * F.values[c + 1] + 3.0 * F.values[c + 2]) / 8.0;
    F0m = (15.0 * F.values[c - 1] - 10.0 * F.values[c - 2] + 3.0 * F.values[c - 3]) / 8.0;
    dF0p = (-2.0 * F.values[c] + 3.0 * F.values[c + 1] - F.values[c + 2]) / h;
    dF0m = (2.0 * F.values[c - 1] - 3.0 * F.values[c - 2] + F.values[c - 3]) / h;
  }
  const double em = h * h / 24.0;

  cplx f_plus = 0.0, f_minus = 0.0;
  for (int j = 0; j < N; ++j) {
    const double x = F.x(j);
    if (x > 0.0)
      f_plus += std::exp(kI * k * x) * fw[j];
    else
      f_minus += std::exp(-kI * k * x) * fw[j];
  }
  if (split) {
    f_plus -= em * (kI * k * F0p + dF0p);
    f_minus += em * (-kI * k * F0m + dF0m);
  }
  const cplx u0 = -(f_minus + f_plus) / (2.0 * kI * k);
  const cplx d0 = -0.5 * (f_minus - f_plus);

  cplx rho_p = 0.0, rho_m = 0.0;
  if (const auto* s = std::get_if<ConnectedOrigin>(&spec)) {
    const BoundaryMatrix2& B = s->B;
    detail::require_nondegenerate(B, tol);
    // rho+ - (alpha - ik beta) rho- = alpha u0 + beta d0 - u0
    // ik rho+ - (gamma - ik delta) rho- = gamma u0 + delta d0 - d0
    const cplx a11 = 1.0, a12 = -(B.alpha - kI * k * B.beta);
    const cplx a21 = kI * k, a22 = -(B.gamma - kI * k * B.delta);
    const cplx det = a11 * a22 - a12 * a21;
    const double scale = std::max({1.0, std::norm(k) * std::abs(B.beta), std::abs(k) * std::abs(B.trace()),
                                   std::abs(B.gamma)});
    if (std::abs(det) < tol * scale) throw Error(ErrorCode::SpectrumPoint, "lambda is an eigenvalue");
    const cplx r1 = B.alpha * u0 + B.beta * d0 - u0;
    const cplx r2 = B.gamma * u0 + B.delta * d0 - d0;
    rho_p = (r1 * a22 - a12 * r2) / det;
    rho_m = (a11 * r2 - a21 * r1) / det;
  } else if (const auto* s = std::get_if<SeparatedOrigin>(&spec)) {
    const auto& p = s->p;
    const cplx e = std::polar(1.0, p.theta);
    const cplx dp = p.h0 * kI * k - p.h1 * e;
    const cplx dm = -p.h0 * kI * k + p.h1 * std::conj(e);
    const double scale = std::max({1.0, std::abs(p.h0 * k), std::abs(p.h1)});
    if (std::abs(dp) < tol * scale || std::abs(dm) < tol * scale)
      throw Error(ErrorCode::SpectrumPoint, "lambda is an eigenvalue");
    rho_p = (p.h1 * e * u0 - p.h0 * d0) / dp;
    rho_m = (-p.h1 * std::conj(e) * u0 - p.h0 * d0) / dm;
  } else {
    throw Error(ErrorCode::InvalidParams, "resolvent is available for origin models only");
  }

  GridFunction U{F.L, F.N, F.offset, std::vector<cplx>(N)};
  for (int j = 0; j < N; ++j) {
    const double x = F.x(j);
    cplx conv = G0 * (lower[j] + upper[j] - fw[j]);
    // kink of the kernel at y = x_j, then the break of F at y = 0
    conv -= 2.0 * em * F.values[j];
    if (split) {
      const cplx e = std::exp(kI * k * std::abs(x));
      const cplx dG = (x > 0.0 ? -0.5 : 0.5) * e;
      conv -= em * (-dG * (F0p - F0m) + G0 * e * (dF0p - dF0m));
    }
    U.values[j] = conv + (x > 0.0 ? rho_p * std::exp(kI * k * x) : rho_m * std::exp(-kI * k * x));
  }
  return U;
}

// ---------------------------------------------------------------------------
// Scattering

/// Plane-wave matching across connected conditions at real k > 0.
/// Left incidence: e^{ikx} + r e^{-ikx} | t e^{ikx}; right incidence: t e^{-ikx} | e^{-ikx} + r e^{ikx}.
inline ScatteringData scattering_coefficients(const BoundaryMatrix2& B, double k, double tol = kDefaultTol) {
  detail::require_nondegenerate(B, tol);
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidParams, "k must be positive");
  const cplx ik = kI * k;
  const cplx p = B.alpha - ik * B.beta, q = B.gamma - ik * B.delta;
  const cplx D = ik * p - q;
  const double scale = std::max({1.0, k * k * std::abs(B.beta), k * std::abs(B.trace()), std::abs(B.gamma)});
  if (std::abs(D) < tol * scale) throw Error(ErrorCode::ResonantK, "matching system singular at this k");
  ScatteringData s;
  // t - p r = alpha + ik beta;  ik t - q r = gamma + ik delta
  const cplx f1 = B.alpha + ik * B.beta, f2 = B.gamma + ik * B.delta;
  s.r_left = (f2 - ik * f1) / D;
  s.t_left = f1 + p * s.r_left;
  // p t - r = 1;  q t - ik r = -ik
  s.t_right = (-ik - ik) / (q - ik * p);
  s.r_right = p * s.t_right - 1.0;
  return s;
}

}  // namespace ptpoint
