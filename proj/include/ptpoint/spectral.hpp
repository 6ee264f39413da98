#pragma once

// Dispersion relations and discrete spectra of point interactions at the origin and at +-l.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ptpoint/contour.hpp"
#include "ptpoint/core.hpp"

namespace ptpoint {

/// Wave number k with lambda = k^2; only Im k > 0 gives square-integrable solutions.
struct WaveNumber {
  cplx k;
  bool physical() const { return k.imag() > 0.0; }
};

enum class EigenKind { NegativeReal, ConjugatePairMember };

inline const char* to_string(EigenKind k) noexcept {
  return k == EigenKind::NegativeReal ? "negative_real" : "conjugate_pair_member";
}

struct Eigenvalue {
  cplx lambda;
  WaveNumber k;
  int multiplicity = 1;
  EigenKind kind = EigenKind::NegativeReal;
};

/// Marker for the absolutely continuous branch [start, inf).
struct AcBranch {
  double start = 0.0;
};

struct SpectrumReport {
  AcBranch ac_branch;
  std::vector<Eigenvalue> eigenvalues;
  std::vector<cplx> nonphysical_roots;
  bool all_real = true;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& e : eigenvalues) n += e.multiplicity;
    return n;
  }
};

/// Search rectangle in the k plane for the transcendental two-point relation.
struct ContourSpec {
  double re_min = -5.0;
  double re_max = 5.0;
  double im_min = 1e-6;
  double im_max = 5.0;
  int nodes_per_side = 64;
  double newton_tol = 1e-12;
  int max_newton_iter = 100;

  void validate() const {
    if (!(im_min > 0.0)) throw Error(ErrorCode::InvalidParams, "contour im_min must be > 0");
    if (!(re_min < re_max) || !(im_min < im_max))
      throw Error(ErrorCode::InvalidParams, "contour needs re_min < re_max and im_min < im_max");
    if (nodes_per_side < 64) throw Error(ErrorCode::InvalidParams, "nodes_per_side must be >= 64");
    if (!(newton_tol > 0.0) || max_newton_iter < 1)
      throw Error(ErrorCode::InvalidParams, "invalid Newton settings");
  }
};

enum class DispersionForm {
  /// The two-point relation with the coefficient k^2 (|alpha|^2 - |delta|^2) in the sine bracket.
  Printed,
  /// The determinant of the 4x4 matching system: coefficient k^2 (|alpha|^2 + |delta|^2).
  Determinant,
};

namespace detail {

inline constexpr double kCoefEps = 1e-14;

/// Roots of a k^2 + b k + c = 0 with a != 0, evaluated without cancellation.
inline std::array<cplx, 2> stable_quadratic(cplx a, cplx b, cplx c) {
  const cplx sq = std::sqrt(b * b - 4.0 * a * c);
  const cplx q = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
  if (q == 0.0) return {0.0, 0.0};
  return {q / a, c / q};
}

inline void sort_roots(std::vector<cplx>& roots) {
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

inline bool is_physical(cplx k, double tol) { return k.imag() > tol * std::max(1.0, std::abs(k)); }

inline Eigenvalue make_eigenvalue(cplx k, int multiplicity, double axis_tol) {
  if (std::abs(k.real()) <= axis_tol * std::max(1.0, std::abs(k))) {
    const double kappa = k.imag();
    return {cplx(-kappa * kappa, 0.0), {cplx(0.0, kappa)}, multiplicity, EigenKind::NegativeReal};
  }
  return {k * k, {k}, multiplicity, EigenKind::ConjugatePairMember};
}

inline void finish(SpectrumReport& r) {
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (a.k.k.real() != b.k.k.real()) return a.k.k.real() < b.k.k.real();
    return a.k.k.imag() < b.k.k.imag();
  });
  r.all_real = std::all_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                           [](const Eigenvalue& e) { return e.kind == EigenKind::NegativeReal; });
}

template <std::size_t N>
cplx horner(const std::array<cplx, N>& c, cplx k) {
  cplx acc = 0.0;
  for (std::size_t j = N; j-- > 0;) acc = acc * k + c[j];
  return acc;
}

template <std::size_t N>
cplx horner_derivative(const std::array<cplx, N>& c, cplx k) {
  cplx acc = 0.0;
  for (std::size_t j = N; j-- > 1;) acc = acc * k + static_cast<double>(j) * c[j];
  return acc;
}

template <std::size_t N>
double abs_poly(const std::array<cplx, N>& c, double r) {
  double acc = 0.0;
  for (std::size_t j = N; j-- > 0;) acc = acc * r + std::abs(c[j]);
  return acc;
}

/// Fujiwara bound on the moduli of the roots: 2 max_j |c_{n-j} / c_n|^{1/j}, with the constant
/// term halved, for the highest nonvanishing coefficient c_n.
inline double root_bound(std::span<const cplx> c) {
  double cmax = 0.0;
  for (cplx z : c) cmax = std::max(cmax, std::abs(z));
  int n = static_cast<int>(c.size()) - 1;
  while (n > 0 && std::abs(c[n]) <= kCoefEps * cmax) --n;
  if (n <= 0) return 0.0;
  double m = 0.0;
  for (int j = 1; j <= n; ++j) {
    double ratio = std::abs(c[n - j] / c[n]);
    if (j == n) ratio *= 0.5;
    m = std::max(m, std::pow(ratio, 1.0 / j));
  }
  return 2.0 * m;
}

}  // namespace detail

/// Polynomial brackets of the two-point relation D(k) = sin(2kl) P1(k) + k cos(2kl) P2(k);
/// coefficients are stored lowest degree first.
struct TwoPointBrackets {
  std::array<cplx, 5> p1{};
  std::array<cplx, 3> p2{};

  static TwoPointBrackets from(const BoundaryMatrix2& B, DispersionForm form) {
    const cplx a = B.alpha, b = B.beta, g = B.gamma, d = B.delta;
    const double a2 = std::norm(a), d2 = std::norm(d);
    TwoPointBrackets t;
    t.p1 = {-std::norm(g), kI * (a * std::conj(g) + std::conj(a) * g),
            form == DispersionForm::Printed ? cplx(a2 - d2) : cplx(a2 + d2),
            -kI * (b * std::conj(d) + std::conj(b) * d), -std::norm(b)};
    t.p2 = {-(g * std::conj(d) + std::conj(g) * d),
            kI * (a * std::conj(d) + std::conj(a) * d + b * std::conj(g) + std::conj(b) * g),
            a * std::conj(b) + std::conj(a) * b};
    return t;
  }

  bool identically_zero(double scale) const {
    for (cplx z : p1)
      if (std::abs(z) > detail::kCoefEps * scale) return false;
    for (cplx z : p2)
      if (std::abs(z) > detail::kCoefEps * scale) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Origin models

/// Roots of b k^2 + 2i cos(phi) sqrt(1 + bc) k - c = 0.
inline std::vector<cplx> dispersion_roots_type_I(const TypeIParams& p) {
  const double s2 = 1.0 + p.b * p.c;
  if (p.b < 0.0 || s2 < 0.0) throw Error(ErrorCode::InvalidParams, "need b >= 0, 1 + bc >= 0");
  const double s = std::sqrt(s2);
  double cphi = std::cos(p.phi);
  if (std::abs(cphi) < 4.0 * std::numeric_limits<double>::epsilon()) cphi = 0.0;
  std::vector<cplx> roots;
  if (p.b > 0.0) {
    const double disc = (1.0 - cphi * cphi) * p.b * p.c - cphi * cphi;
    if (disc >= 0.0) {
      const double re = std::sqrt(disc) / p.b, im = -cphi * s / p.b;
      roots = {cplx(re, im), cplx(-re, im)};
    } else {
      // k = i kappa; the larger |kappa| first, the other from kappa1 kappa2 = c / b.
      const double root = std::sqrt(-disc);
      const double kappa1 = (-cphi * s - (cphi >= 0.0 ? root : -root)) / p.b;
      const double kappa2 = (kappa1 != 0.0) ? p.c / (p.b * kappa1) : 0.0;
      roots = {cplx(0.0, kappa1), cplx(0.0, kappa2)};
    }
  } else if (cphi != 0.0) {
    roots = {cplx(0.0, -p.c / (2.0 * cphi * s))};
  } else if (p.c == 0.0) {
    throw Error(ErrorCode::DegenerateIdenticallyZero, "b = c = 0 and cos(phi) = 0: every k solves the relation");
  }
  detail::sort_roots(roots);
  return roots;
}

/// Roots of beta k^2 + i (alpha + delta) k - gamma = 0.
inline std::vector<cplx> dispersion_roots_general(const BoundaryMatrix2& B) {
  const double scale = B.max_abs();
  const cplx tr = B.trace();
  const bool beta_zero = std::abs(B.beta) <= detail::kCoefEps * scale;
  const bool trace_zero = std::abs(tr) <= detail::kCoefEps * scale;
  std::vector<cplx> roots;
  if (!beta_zero) {
    const auto r = detail::stable_quadratic(B.beta, kI * tr, -B.gamma);
    roots = {r[0], r[1]};
  } else if (!trace_zero) {
    roots = {-kI * B.gamma / tr};
  } else if (std::abs(B.gamma) <= detail::kCoefEps * scale) {
    throw Error(ErrorCode::DegenerateIdenticallyZero, "beta = gamma = alpha + delta = 0");
  }
  detail::sort_roots(roots);
  return roots;
}

inline SpectrumReport discrete_spectrum_origin_connected(const BoundaryMatrix2& B,
                                                         double tol = kDefaultTol) {
  detail::require_nondegenerate(B, tol);
  const std::vector<cplx> roots = dispersion_roots_general(B);
  SpectrumReport r;
  std::vector<cplx> phys;
  for (cplx k : roots) {
    if (detail::is_physical(k, tol))
      phys.push_back(k);
    else
      r.nonphysical_roots.push_back(k);
  }
  // A double root of the connected relation still gives a simple eigenvalue.
  if (phys.size() == 2 && std::abs(phys[0] - phys[1]) <= 1e-7 * std::max(1.0, std::abs(phys[0]))) {
    phys = {0.5 * (phys[0] + phys[1])};
  }
  for (cplx k : phys) r.eigenvalues.push_back(detail::make_eigenvalue(k, 1, tol));
  detail::finish(r);
  return r;
}

inline SpectrumReport discrete_spectrum_separated(const TypeIIParams& p, double tol = kDefaultTol) {
  SpectrumReport r;
  if (p.h0 == 0.0) return r;  // Dirichlet on both half-lines
  const double sigma = p.h1 / p.h0;
  const cplx k_right = -kI * sigma * std::polar(1.0, p.theta);
  const cplx k_left = -kI * sigma * std::polar(1.0, -p.theta);
  const bool right = detail::is_physical(k_right, tol);
  const bool left = detail::is_physical(k_left, tol);
  if (right && left && std::abs(k_right - k_left) <= tol * std::max(1.0, std::abs(k_right))) {
    r.eigenvalues.push_back(detail::make_eigenvalue(0.5 * (k_right + k_left), 2, tol));
  } else {
    for (auto [k, phys] : {std::pair{k_right, right}, std::pair{k_left, left}}) {
      if (phys)
        r.eigenvalues.push_back(detail::make_eigenvalue(k, 1, tol));
      else
        r.nonphysical_roots.push_back(k);
    }
  }
  detail::finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Real-spectrum criteria

enum class RealCondition { I, II, Both, Neither };

inline const char* to_string(RealCondition c) noexcept {
  switch (c) {
    case RealCondition::I: return "I";
    case RealCondition::II: return "II";
    case RealCondition::Both: return "Both";
    case RealCondition::Neither: return "Neither";
  }
  return "Neither";
}

struct RealSpectrumVerdict {
  bool is_real = false;
  RealCondition condition = RealCondition::Neither;
};

/// Condition I: bc sin^2 phi <= cos^2 phi.  Condition II: bc sin^2 phi >= cos^2 phi and cos phi >= 0.
inline RealSpectrumVerdict real_spectrum_predicate_type_I(const TypeIParams& p) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double sn = std::sin(p.phi);
  double cs = std::cos(p.phi);
  if (std::abs(cs) < 4.0 * eps) cs = 0.0;
  const double lhs = p.b * p.c * sn * sn, rhs = cs * cs;
  // equality up to rounding counts for both conditions: the roots then meet on the axis
  const double slack = 8.0 * eps * std::max(std::abs(lhs), rhs);
  const bool c1 = lhs <= rhs + slack;
  const bool c2 = lhs >= rhs - slack && cs >= 0.0;
  RealSpectrumVerdict v;
  v.is_real = c1 || c2;
  v.condition = c1 && c2 ? RealCondition::Both
                : c1     ? RealCondition::I
                : c2     ? RealCondition::II
                         : RealCondition::Neither;
  return v;
}

enum class GeneralRealClass {
  RealAllRootsLowerHalf,
  RealPureImaginaryRoots,
  /// Real spectrum with one root on the imaginary axis and the other in the lower half plane.
  RealMixedRoots,
  ComplexSpectrum,
};

inline const char* to_string(GeneralRealClass c) noexcept {
  switch (c) {
    case GeneralRealClass::RealAllRootsLowerHalf: return "RealAllRootsLowerHalf";
    case GeneralRealClass::RealPureImaginaryRoots: return "RealPureImaginaryRoots";
    case GeneralRealClass::RealMixedRoots: return "RealMixedRoots";
    case GeneralRealClass::ComplexSpectrum: return "ComplexSpectrum";
  }
  return "ComplexSpectrum";
}

inline GeneralRealClass real_spectrum_classify_general(const BoundaryMatrix2& B,
                                                       double tol = kDefaultTol) {
  detail::require_nondegenerate(B, tol);
  const std::vector<cplx> roots = dispersion_roots_general(B);
  auto on_axis = [tol](cplx k) { return std::abs(k.real()) <= tol * std::max(1.0, std::abs(k)); };
  auto lower = [tol](cplx k) { return k.imag() <= tol * std::max(1.0, std::abs(k)); };

  bool pure_imaginary = false;
  if (std::abs(B.beta) > detail::kCoefEps * B.max_abs()) {
    const cplx r1 = B.trace() / B.beta, r2 = B.gamma / B.beta;
    const bool real1 = std::abs(r1.imag()) <= tol * std::max(1.0, std::abs(r1));
    const bool real2 = std::abs(r2.imag()) <= tol * std::max(1.0, std::abs(r2));
    const double t = r1.real();
    const bool ineq = 4.0 * r2.real() <= t * t + tol * std::max(1.0, t * t);
    // gamma = 0 puts a root at the threshold k = 0, which is not on the imaginary axis proper.
    pure_imaginary = real1 && real2 && ineq && std::abs(r2) > tol;
  } else if (roots.size() == 1) {
    pure_imaginary = on_axis(roots[0]) && std::abs(roots[0]) > tol;
  }
  if (pure_imaginary) return GeneralRealClass::RealPureImaginaryRoots;
  if (std::all_of(roots.begin(), roots.end(), lower)) return GeneralRealClass::RealAllRootsLowerHalf;
  if (std::all_of(roots.begin(), roots.end(), [&](cplx k) { return lower(k) || on_axis(k); }))
    return GeneralRealClass::RealMixedRoots;
  return GeneralRealClass::ComplexSpectrum;
}

// ---------------------------------------------------------------------------
// Two-point models

inline cplx two_point_dispersion(const BoundaryMatrix2& B, double l, cplx k, DispersionForm form) {
  const TwoPointBrackets t = TwoPointBrackets::from(B, form);
  return std::sin(2.0 * k * l) * detail::horner(t.p1, k) +
         k * std::cos(2.0 * k * l) * detail::horner(t.p2, k);
}

/// D(k) = sin(2kl){-k^4|b|^2 - ik^3(b d* + b* d) + k^2(|a|^2 - |d|^2) + ik(a g* + a* g) - |g|^2}
///      + k cos(2kl){k^2(a b* + a* b) + ik(a d* + a* d + b g* + b* g) - (g d* + g* d)}.
inline cplx two_point_dispersion_value(const BoundaryMatrix2& B, double l, cplx k) {
  return two_point_dispersion(B, l, k, DispersionForm::Printed);
}

/// e^{2ikl} D(k): same zeros as D, bounded growth in the upper half plane.
inline AnalyticSample two_point_scaled_sample(const TwoPointBrackets& t, double l, cplx k) {
  const cplx e = std::exp(4.0 * kI * k * l);
  const cplx s = (e - 1.0) / (2.0 * kI);
  const cplx c = 0.5 * (e + 1.0);
  const cplx ds = 2.0 * l * e;
  const cplx dc = 2.0 * kI * l * e;
  const cplx P1 = detail::horner(t.p1, k), dP1 = detail::horner_derivative(t.p1, k);
  const cplx P2 = detail::horner(t.p2, k), dP2 = detail::horner_derivative(t.p2, k);
  AnalyticSample out;
  out.value = s * P1 + k * c * P2;
  out.derivative = ds * P1 + s * dP1 + c * P2 + k * dc * P2 + k * c * dP2;
  const double r = std::abs(k);
  out.scale = 0.5 * (1.0 + std::abs(e)) * (detail::abs_poly(t.p1, r) + r * detail::abs_poly(t.p2, r));
  return out;
}

/// Default search rectangle [-K, K] x [1e-6, K], K = 2 (1 + largest root bound of the brackets).
inline ContourSpec default_contour(const BoundaryMatrix2& B, DispersionForm form = DispersionForm::Printed) {
  const TwoPointBrackets t = TwoPointBrackets::from(B, form);
  // Far into the upper half plane D ~ e^{-2ikl} (i P1 + k P2) / 2.
  std::array<cplx, 5> asym{};
  for (std::size_t j = 0; j < 5; ++j) asym[j] = kI * t.p1[j];
  for (std::size_t j = 0; j < 3; ++j) asym[j + 1] += t.p2[j];
  const double bound = std::max({detail::root_bound(t.p1), detail::root_bound(t.p2), detail::root_bound(asym)});
  const double K = 2.0 * (1.0 + bound);
  ContourSpec c;
  c.re_min = -K;
  c.re_max = K;
  c.im_min = 1e-6;
  c.im_max = K;
  return c;
}

inline SpectrumReport two_point_spectrum(const BoundaryMatrix2& B, double l, const ContourSpec& contour,
                                         DispersionForm form = DispersionForm::Printed) {
  if (!(l > 0.0)) throw Error(ErrorCode::InvalidParams, "l must be positive");
  contour.validate();
  const TwoPointBrackets t = TwoPointBrackets::from(B, form);
  if (t.identically_zero(std::max(1.0, B.max_abs() * B.max_abs()))) {
    throw Error(ErrorCode::DegenerateIdenticallyZero, "two-point relation vanishes identically");
  }
  ZeroSearchOptions opt;
  opt.nodes_per_side = contour.nodes_per_side;
  opt.newton_tol = contour.newton_tol;
  opt.max_newton_iter = contour.max_newton_iter;
  auto f = [&t, l](cplx k) { return two_point_scaled_sample(t, l, k); };
  const auto zeros =
      find_zeros(f, Rect{contour.re_min, contour.re_max, contour.im_min, contour.im_max}, opt);
  SpectrumReport r;
  const double axis_tol = 1e3 * contour.newton_tol;
  for (const auto& z : zeros) {
    // an unresolved cluster straddling the imaginary axis sits on it
    const double tol_z = std::max(axis_tol, z.radius / std::max(1.0, std::abs(z.z)));
    r.eigenvalues.push_back(detail::make_eigenvalue(z.z, z.order, tol_z));
  }
  detail::finish(r);
  return r;
}

struct DeltaPairRoots {
  std::vector<cplx> roots;
  /// v = +-1: the quadratic bracket degenerates to the linear 2ik - 1 = 0.
  bool degenerate_v = false;
};

/// Zeros of the bracket k^2 (1 - v^2) + 2ik - 1 of the purely imaginary delta pair (u = 0):
/// k = -i / (1 + v), -i / (1 - v).
inline DeltaPairRoots delta_pair_closed_form_roots(double v) {
  DeltaPairRoots r;
  if (std::abs(1.0 - v * v) <= 1e-14) {
    r.degenerate_v = true;
    r.roots = {cplx(0.0, -0.5)};
    return r;
  }
  r.roots = {cplx(0.0, -1.0 / (1.0 + v)), cplx(0.0, -1.0 / (1.0 - v))};
  detail::sort_roots(r.roots);
  return r;
}

// ---------------------------------------------------------------------------

struct SpectrumOptions {
  double tol = kDefaultTol;
  std::optional<ContourSpec> contour;
  DispersionForm form = DispersionForm::Printed;
};

inline SpectrumReport compute_spectrum(const InteractionSpec& spec, const SpectrumOptions& opt = {}) {
  if (const auto* s = std::get_if<ConnectedOrigin>(&spec))
    return discrete_spectrum_origin_connected(s->B, opt.tol);
  if (const auto* s = std::get_if<SeparatedOrigin>(&spec))
    return discrete_spectrum_separated(s->p, opt.tol);
  double l = 0.0;
  BoundaryMatrix2 B;
  if (const auto* s = std::get_if<TwoPoint>(&spec)) {
    l = s->l;
    B = interface_matrix(*s);
  } else {
    const auto& d = std::get<DeltaPair>(spec);
    l = d.l;
    B = interface_matrix(d);
  }
  return two_point_spectrum(B, l, opt.contour.value_or(default_contour(B, opt.form)), opt.form);
}

}  // namespace ptpoint
