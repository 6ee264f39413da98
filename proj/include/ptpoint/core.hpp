#pragma once

// Boundary-condition parameterizations of PT-self-adjoint point interactions
// and the algebraic predicates that classify them.
//
// Boundary values are ordered (psi(+0), psi'(+0), psi(-0), psi'(-0)) throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "ptpoint/error.hpp"

namespace ptpoint {

using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr cplx kI{0.0, 1.0};

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// 2x2 complex matrix [[alpha, beta], [gamma, delta]] acting on (psi, psi').
struct BoundaryMatrix2 {
  cplx alpha{1.0};
  cplx beta{0.0};
  cplx gamma{0.0};
  cplx delta{1.0};

  static BoundaryMatrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static BoundaryMatrix2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

  cplx det() const { return alpha * delta - beta * gamma; }
  cplx trace() const { return alpha + delta; }

  double max_abs() const {
    return std::max({std::abs(alpha), std::abs(beta), std::abs(gamma), std::abs(delta)});
  }

  BoundaryMatrix2 conjugate() const {
    return {std::conj(alpha), std::conj(beta), std::conj(gamma), std::conj(delta)};
  }

  /// J * conj(B) * J with J = diag(1, -1): the condition at -l that mirrors B at +l.
  BoundaryMatrix2 pt_mirror() const {
    return {std::conj(alpha), -std::conj(beta), -std::conj(gamma), std::conj(delta)};
  }

  BoundaryMatrix2 inverse() const {
    const cplx d = det();
    return {delta / d, -beta / d, -gamma / d, alpha / d};
  }

  BoundaryMatrix2 scaled(cplx s) const { return {s * alpha, s * beta, s * gamma, s * delta}; }

  friend BoundaryMatrix2 operator*(const BoundaryMatrix2& a, const BoundaryMatrix2& b) {
    return {a.alpha * b.alpha + a.beta * b.gamma, a.alpha * b.beta + a.beta * b.delta,
            a.gamma * b.alpha + a.delta * b.gamma, a.gamma * b.beta + a.delta * b.delta};
  }
  friend BoundaryMatrix2 operator+(const BoundaryMatrix2& a, const BoundaryMatrix2& b) {
    return {a.alpha + b.alpha, a.beta + b.beta, a.gamma + b.gamma, a.delta + b.delta};
  }
  friend BoundaryMatrix2 operator-(const BoundaryMatrix2& a, const BoundaryMatrix2& b) {
    return {a.alpha - b.alpha, a.beta - b.beta, a.gamma - b.gamma, a.delta - b.delta};
  }
  friend bool operator==(const BoundaryMatrix2&, const BoundaryMatrix2&) = default;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const BoundaryMatrix2& a, const BoundaryMatrix2& b) {
  return (a - b).max_abs();
}

/// Connected PT-self-adjoint conditions: B = e^{i theta} [[s e^{i phi}, b], [c, s e^{-i phi}]],
/// s = sqrt(1 + b c).
struct TypeIParams {
  double theta = 0.0;
  double phi = 0.0;
  double b = 0.0;
  double c = 0.0;

  friend bool operator==(const TypeIParams&, const TypeIParams&) = default;
};

/// Separated conditions h0 psi'(+0) = h1 e^{i theta} psi(+0), h0 psi'(-0) = -h1 e^{-i theta} psi(-0).
/// (h0, h1) is a point of the real projective line; construct through make() to canonicalize.
struct TypeIIParams {
  double theta = 0.0;
  double h0 = 1.0;
  double h1 = 0.0;

  static TypeIIParams make(double theta, double h0, double h1) {
    const double n = std::hypot(h0, h1);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorCode::InvalidParams, "type II parameters h0, h1 must not both vanish");
    }
    h0 /= n;
    h1 /= n;
    if (h0 < 0.0 || (h0 == 0.0 && h1 < 0.0)) {
      h0 = -h0;
      h1 = -h1;
    }
    return {theta, h0, h1};
  }

  friend bool operator==(const TypeIIParams&, const TypeIIParams&) = default;
};

/// Parameters of the antidiagonal-type matrices of forms C and D.
struct FormCDParams {
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct BoundaryVector4 {
  cplx psi_plus{};
  cplx dpsi_plus{};
  cplx psi_minus{};
  cplx dpsi_minus{};

  friend bool operator==(const BoundaryVector4&, const BoundaryVector4&) = default;
};

/// 2x4 coefficient matrix of two boundary conditions Q * (psi(+0), psi'(+0), psi(-0), psi'(-0))^T = 0.
using QMatrix = std::array<std::array<cplx, 4>, 2>;

enum class DeltaVariant { Default, TextbookDelta };

struct ConnectedOrigin {
  BoundaryMatrix2 B;
  friend bool operator==(const ConnectedOrigin&, const ConnectedOrigin&) = default;
};
struct SeparatedOrigin {
  TypeIIParams p;
  friend bool operator==(const SeparatedOrigin&, const SeparatedOrigin&) = default;
};
/// Conditions B at +l; the condition at -l is always the PT mirror of B.
struct TwoPoint {
  double l = 1.0;
  BoundaryMatrix2 B;
  friend bool operator==(const TwoPoint&, const TwoPoint&) = default;
};
/// Formal potential (u + iv) delta(x - l) + (u - iv) delta(x + l).
struct DeltaPair {
  double u = 0.0;
  double v = 0.0;
  double l = 1.0;
  DeltaVariant variant = DeltaVariant::Default;
  friend bool operator==(const DeltaPair&, const DeltaPair&) = default;
};

using InteractionSpec = std::variant<ConnectedOrigin, SeparatedOrigin, TwoPoint, DeltaPair>;

enum class Family { TypeI, TypeII, FormC, FormD, General };

inline const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::TypeI: return "TypeI";
    case Family::TypeII: return "TypeII";
    case Family::FormC: return "FormC";
    case Family::FormD: return "FormD";
    case Family::General: return "General";
  }
  return "General";
}

struct ClassificationReport {
  bool pt_selfadjoint = false;
  bool selfadjoint = false;
  Family family = Family::General;
  std::optional<TypeIParams> type_I;
  std::optional<TypeIIParams> type_II;
  std::optional<FormCDParams> form_cd;
  std::string notes;
};

struct TypeIExtraction {
  TypeIParams params;
  /// True when theta had to be moved to [pi, 2 pi) to keep b >= 0.
  bool pi_shifted = false;
};

struct CanonicalQ {
  int case_id = 1;
  BoundaryMatrix2 B;
};

// ---------------------------------------------------------------------------

inline BoundaryMatrix2 matrix_from_type_I(const TypeIParams& p) {
  const double s2 = 1.0 + p.b * p.c;
  if (!std::isfinite(s2) || s2 < 0.0 || p.b < 0.0) {
    throw Error(ErrorCode::InvalidParams, "type I parameters need b >= 0 and 1 + b c >= 0");
  }
  const double s = std::sqrt(s2);
  const cplx ph = std::polar(1.0, p.theta);
  return {ph * std::polar(s, p.phi), ph * p.b, ph * p.c, ph * std::polar(s, -p.phi)};
}

/// Recovers type I parameters from a matrix. tol is relative to the largest entry.
inline TypeIExtraction type_I_from_matrix(const BoundaryMatrix2& B, double tol = kDefaultTol) {
  const double scale = std::max(1.0, B.max_abs());
  const cplx d = B.det();
  if (std::abs(d) < tol * scale * scale) {
    throw Error(ErrorCode::Degenerate, "matrix is singular");
  }
  if (std::abs(std::abs(d) - 1.0) > tol * scale * scale) {
    throw Error(ErrorCode::NotInFamily, "|det B| differs from 1");
  }
  double theta0 = 0.5 * std::arg(d);
  if (theta0 < 0.0) theta0 += std::numbers::pi;

  std::string why = "no phase branch makes the matrix a type I matrix";
  for (int shift = 0; shift < 2; ++shift) {
    const double theta = theta0 + shift * std::numbers::pi;
    const BoundaryMatrix2 Bp = B.scaled(std::polar(1.0, -theta));
    if (std::abs(Bp.beta.imag()) > tol * scale || std::abs(Bp.gamma.imag()) > tol * scale) {
      why = "e^{-i theta} beta or e^{-i theta} gamma is not real";
      continue;
    }
    double b = Bp.beta.real();
    const double c = Bp.gamma.real();
    if (b < -tol * scale) {
      why = "b < 0 on this branch";
      continue;
    }
    b = std::max(b, 0.0);
    const double s2 = 1.0 + b * c;
    if (s2 < -tol * scale * scale) {
      why = "1 + b c < 0";
      continue;
    }
    const double s = std::sqrt(std::max(s2, 0.0));
    if (std::abs(std::abs(Bp.alpha) - s) > tol * scale ||
        std::abs(std::abs(Bp.delta) - s) > tol * scale) {
      why = "diagonal moduli differ from sqrt(1 + b c)";
      continue;
    }
    const double phi = (s > tol * scale) ? wrap_angle(std::arg(Bp.alpha)) : 0.0;
    TypeIParams p{theta, phi, b, s2 >= 0.0 ? c : -1.0 / b};
    if (max_abs_diff(matrix_from_type_I(p), B) > 10.0 * tol * scale) {
      why = "regenerated matrix does not match (delta != conj(alpha) up to phase)";
      continue;
    }
    return {p, shift == 1};
  }
  throw Error(ErrorCode::NotInFamily, why);
}

namespace detail {
inline void require_nondegenerate(const BoundaryMatrix2& B, double tol) {
  const double scale = B.max_abs();
  if (!(scale > 0.0) || std::abs(B.det()) < tol * scale * scale) {
    throw Error(ErrorCode::Degenerate, "boundary matrix is singular (|det B| below tolerance)");
  }
}
}  // namespace detail

/// PT invariance of connected conditions: B J conj(B) J = I.
inline bool is_pt_connected(const BoundaryMatrix2& B, double tol = kDefaultTol) {
  detail::require_nondegenerate(B, tol);
  const double scale = std::max(1.0, B.max_abs());
  const BoundaryMatrix2 R = B * B.pt_mirror() - BoundaryMatrix2::identity();
  return R.max_abs() <= tol * scale * scale;
}

/// Self-adjoint connected conditions: B = e^{i theta} M with M real and det M = 1.
inline bool is_selfadjoint_connected(const BoundaryMatrix2& B, double tol = kDefaultTol) {
  detail::require_nondegenerate(B, tol);
  const double scale = std::max(1.0, B.max_abs());
  const cplx d = B.det();
  if (std::abs(std::abs(d) - 1.0) > tol * scale * scale) return false;
  const BoundaryMatrix2 Bp = B.scaled(std::polar(1.0, -0.5 * std::arg(d)));
  for (cplx z : {Bp.alpha, Bp.beta, Bp.gamma, Bp.delta}) {
    if (std::abs(z.imag()) > tol * scale) return false;
  }
  return std::abs(Bp.det() - 1.0) <= tol * scale * scale;
}

/// PT condition for forms C and D: alpha = -conj(delta), beta = -conj(gamma).
inline bool is_pt_antidiagonal_form(const BoundaryMatrix2& B, double tol = kDefaultTol) {
  const double scale = std::max(1.0, B.max_abs());
  return std::abs(B.alpha + std::conj(B.delta)) <= tol * scale &&
         std::abs(B.beta + std::conj(B.gamma)) <= tol * scale;
}

inline BoundaryMatrix2 form_cd_matrix(const FormCDParams& p) {
  if (p.a < 0.0 || p.b < 0.0) throw Error(ErrorCode::InvalidParams, "forms C/D need a, b >= 0");
  return {std::polar(p.a, p.theta), std::polar(p.b, p.phi), -std::polar(p.b, -p.phi),
          -std::polar(p.a, -p.theta)};
}

/// Inverse of form_cd_matrix for matrices passing is_pt_antidiagonal_form.
inline FormCDParams form_cd_from_matrix(const BoundaryMatrix2& B) {
  return {std::abs(B.alpha), std::abs(B.beta), wrap_angle(std::arg(B.alpha)),
          wrap_angle(std::arg(B.beta))};
}

/// Column layout of the six solved-out forms. lhs = B * rhs, indices into the boundary vector.
struct QCaseLayout {
  std::array<int, 2> lhs;
  std::array<int, 2> rhs;
};

inline constexpr std::array<QCaseLayout, 6> kQCases{{
    {{0, 1}, {2, 3}},  // (psi(+0), psi'(+0)) = B (psi(-0), psi'(-0))
    {{0, 2}, {1, 3}},  // (psi(+0), psi(-0))  = B (psi'(+0), psi'(-0))
    {{0, 3}, {2, 1}},  // (psi(+0), psi'(-0)) = B (psi(-0), psi'(+0))
    {{2, 1}, {0, 3}},  // (psi(-0), psi'(+0)) = B (psi(+0), psi'(-0))
    {{1, 3}, {0, 2}},  // (psi'(+0), psi'(-0)) = B (psi(+0), psi(-0))
    {{2, 3}, {0, 1}},  // (psi(-0), psi'(-0)) = B (psi(+0), psi'(+0))
}};

inline cplx q_minor(const QMatrix& Q, int i, int j) {
  return Q[0][i] * Q[1][j] - Q[0][j] * Q[1][i];
}

/// Picks the first of the six solved-out forms whose minor is well conditioned and returns
/// its matrix. The kernel of Q coincides with {x : x[lhs] = B x[rhs]}.
inline CanonicalQ canonicalize_Q(const QMatrix& Q, double tol = kDefaultTol) {
  double qmax = 0.0;
  for (const auto& row : Q)
    for (cplx z : row) qmax = std::max(qmax, std::abs(z));
  std::array<double, 6> minors{};
  double largest = 0.0;
  for (int c = 0; c < 6; ++c) {
    const auto& lay = kQCases[c];
    minors[c] = std::abs(q_minor(Q, lay.lhs[0], lay.lhs[1]));
    largest = std::max(largest, minors[c]);
  }
  if (!(qmax > 0.0) || largest <= tol * qmax * qmax) {
    throw Error(ErrorCode::RankDeficient, "all 2x2 minors of Q vanish");
  }
  for (int c = 0; c < 6; ++c) {
    if (minors[c] <= tol * largest) continue;
    const auto& lay = kQCases[c];
    // B = -Q_lhs^{-1} Q_rhs
    const cplx a = Q[0][lay.lhs[0]], b = Q[0][lay.lhs[1]];
    const cplx cc = Q[1][lay.lhs[0]], d = Q[1][lay.lhs[1]];
    const cplx det = a * d - b * cc;
    const cplx r00 = Q[0][lay.rhs[0]], r01 = Q[0][lay.rhs[1]];
    const cplx r10 = Q[1][lay.rhs[0]], r11 = Q[1][lay.rhs[1]];
    BoundaryMatrix2 B{-(d * r00 - b * r10) / det, -(d * r01 - b * r11) / det,
                      -(-cc * r00 + a * r10) / det, -(-cc * r01 + a * r11) / det};
    return {c + 1, B};
  }
  throw Error(ErrorCode::RankDeficient, "no usable minor");
}

/// Q = [I, -B]: the connected conditions psi(+) = B psi(-) in 2x4 form.
inline QMatrix q_from_connected(const BoundaryMatrix2& B) {
  return {{{1.0, 0.0, -B.alpha, -B.beta}, {0.0, 1.0, -B.gamma, -B.delta}}};
}

inline QMatrix q_from_separated(const TypeIIParams& p) {
  return {{{p.h1 * std::polar(1.0, p.theta), -p.h0, 0.0, 0.0},
           {0.0, 0.0, p.h1 * std::polar(1.0, -p.theta), p.h0}}};
}

/// PT acting on boundary values: (psi+, psi+', psi-, psi-') -> (conj psi-, -conj psi-', conj psi+, -conj psi+').
inline BoundaryVector4 pt_boundary_image(const BoundaryVector4& v) {
  return {std::conj(v.psi_minus), -std::conj(v.dpsi_minus), std::conj(v.psi_plus),
          -std::conj(v.dpsi_plus)};
}

inline BoundaryMatrix2 delta_pair_matrix(double u, double v,
                                         DeltaVariant variant = DeltaVariant::Default) {
  if (variant == DeltaVariant::TextbookDelta) return {1.0, 0.0, cplx(u, v), 1.0};
  return {1.0, 0.0, 1.0, cplx(u, v)};
}

/// Matrix of the condition at +l for a two-point model.
inline BoundaryMatrix2 interface_matrix(const TwoPoint& s) { return s.B; }
inline BoundaryMatrix2 interface_matrix(const DeltaPair& s) {
  return delta_pair_matrix(s.u, s.v, s.variant);
}

inline void validate(const InteractionSpec& spec, double tol = kDefaultTol) {
  std::visit(
      [tol](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConnectedOrigin>) {
          detail::require_nondegenerate(s.B, tol);
        } else if constexpr (std::is_same_v<T, SeparatedOrigin>) {
          if (s.p.h0 == 0.0 && s.p.h1 == 0.0)
            throw Error(ErrorCode::InvalidParams, "h0 and h1 both zero");
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          if (!(s.l > 0.0)) throw Error(ErrorCode::InvalidParams, "l must be positive");
          detail::require_nondegenerate(s.B, tol);
        } else {
          if (!(s.l > 0.0)) throw Error(ErrorCode::InvalidParams, "l must be positive");
        }
      },
      spec);
}

/// Classification of a Q matrix through its canonical solved-out form.
inline ClassificationReport classify_Q(const QMatrix& Q, double tol = kDefaultTol) {
  const CanonicalQ cq = canonicalize_Q(Q, tol);
  ClassificationReport r;
  r.notes = "canonical case " + std::to_string(cq.case_id);
  switch (cq.case_id) {
    case 2:
    case 5:
      r.pt_selfadjoint = is_pt_antidiagonal_form(cq.B, tol);
      r.family = r.pt_selfadjoint ? (cq.case_id == 2 ? Family::FormC : Family::FormD)
                                  : Family::General;
      if (r.pt_selfadjoint) r.form_cd = form_cd_from_matrix(cq.B);
      break;
    default: {
      const double scale = std::max(1.0, cq.B.max_abs());
      if (std::abs(cq.B.det()) < tol * scale * scale) break;
      r.pt_selfadjoint = is_pt_connected(cq.B, tol);
      if (r.pt_selfadjoint) {
        r.family = Family::TypeI;
        if (cq.case_id == 1 || cq.case_id == 6) {
          const BoundaryMatrix2 B = cq.case_id == 1 ? cq.B : cq.B.inverse();
          r.type_I = type_I_from_matrix(B, std::sqrt(tol)).params;
          r.selfadjoint = is_selfadjoint_connected(B, tol);
        } else {
          r.notes += " (form B: psi(+0), psi'(-0) solved out)";
        }
      }
      break;
    }
  }
  return r;
}

inline ClassificationReport classify(const InteractionSpec& spec, double tol = kDefaultTol) {
  ClassificationReport r;
  if (const auto* s = std::get_if<ConnectedOrigin>(&spec)) {
    r.pt_selfadjoint = is_pt_connected(s->B, tol);
    r.selfadjoint = is_selfadjoint_connected(s->B, tol);
    if (r.pt_selfadjoint) {
      r.family = Family::TypeI;
      r.type_I = type_I_from_matrix(s->B, tol).params;
      if (r.type_I->b == 0.0 && r.type_I->c == 0.0) {
        r.notes = "b = c = 0: parameters are determined only up to shifting theta and phi by pi";
      }
    } else {
      r.family = Family::General;
      r.notes = "connected conditions are not PT-invariant";
    }
  } else if (const auto* s = std::get_if<SeparatedOrigin>(&spec)) {
    r.pt_selfadjoint = true;
    // Each half-line condition psi' = sigma psi is self-adjoint iff sigma is real.
    r.selfadjoint = s->p.h0 == 0.0 || s->p.h1 == 0.0 || std::abs(std::sin(s->p.theta)) <= tol;
    r.family = Family::TypeII;
    r.type_II = s->p;
  } else {
    const double l = std::holds_alternative<TwoPoint>(spec) ? std::get<TwoPoint>(spec).l
                                                            : std::get<DeltaPair>(spec).l;
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidParams, "l must be positive");
    const BoundaryMatrix2 B = std::holds_alternative<TwoPoint>(spec)
                                  ? interface_matrix(std::get<TwoPoint>(spec))
                                  : interface_matrix(std::get<DeltaPair>(spec));
    r.pt_selfadjoint = true;
    r.selfadjoint = is_selfadjoint_connected(B, tol);
    if (is_pt_connected(B, tol)) {
      r.family = Family::TypeI;
      r.type_I = type_I_from_matrix(B, tol).params;
    } else {
      r.family = Family::General;
    }
    r.notes = "conditions at -l are the PT mirror of those at +l; family refers to B at +l";
  }
  return r;
}

}  // namespace ptpoint
