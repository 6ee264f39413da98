#pragma once

// Zeros of an analytic function inside a rectangle: argument-principle counting on the
// boundary, recursive subdivision until each cell holds one zero cluster, Newton polish.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ptpoint/error.hpp"

namespace ptpoint {

/// Value and derivative of an analytic function at a point, plus the magnitude of the
/// largest term that went into the value (used to detect cancellation to zero).
struct AnalyticSample {
  std::complex<double> value;
  std::complex<double> derivative;
  double scale = 1.0;
};

struct Rect {
  double re_min, re_max, im_min, im_max;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  std::complex<double> center() const {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
  bool contains(std::complex<double> z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
};

struct ContourZero {
  std::complex<double> z;
  int order = 1;
  /// Nonzero for clusters that could not be separated: half-diagonal of the enclosing cell.
  double radius = 0.0;
};

struct ZeroSearchOptions {
  int nodes_per_side = 64;
  double newton_tol = 1e-12;
  int max_newton_iter = 100;
  /// |f| <= through_zero_rel * scale on the contour means the contour hits a zero.
  double through_zero_rel = 1e-13;
  /// Largest phase step accepted between neighbouring contour nodes before bisecting.
  double max_phase_step = std::numbers::pi / 4;
  int max_bisect_depth = 48;
  int max_node_doublings = 4;
  int max_subdivision_depth = 60;
};

namespace detail {

template <class F>
class ZeroFinder {
 public:
  ZeroFinder(F& f, const ZeroSearchOptions& opt) : f_(f), opt_(opt) {}

  AnalyticSample eval(std::complex<double> z) {
    AnalyticSample s = f_(z);
    if (!(std::abs(s.value) > opt_.through_zero_rel * s.scale)) {
      throw Error(ErrorCode::ContourThroughZero,
                  "function vanishes on the contour near k = (" + std::to_string(z.real()) +
                      ", " + std::to_string(z.imag()) + ")");
    }
    return s;
  }

  static double log_rate(const AnalyticSample& s) { return std::abs(s.derivative / s.value); }

  /// Phase change of f from za to zb. Bisects until the phase step is small and the
  /// log-derivative bound |f'/f| |zb - za| rules out whole turns hidden between the ends.
  double segment_phase(std::complex<double> za, const AnalyticSample& fa, std::complex<double> zb,
                       const AnalyticSample& fb, int depth) {
    const double d = std::arg(fb.value * std::conj(fa.value));
    const double swing = std::abs(zb - za) * std::max(log_rate(fa), log_rate(fb));
    if (std::abs(d) <= opt_.max_phase_step && swing <= 2.0 * opt_.max_phase_step) return d;
    if (depth >= opt_.max_bisect_depth) {
      throw Error(ErrorCode::ContourThroughZero, "phase not resolved along contour segment");
    }
    const std::complex<double> zm = 0.5 * (za + zb);
    const AnalyticSample fm = eval(zm);
    return segment_phase(za, fa, zm, fm, depth + 1) + segment_phase(zm, fm, zb, fb, depth + 1);
  }

  /// Total phase change of f along the closed boundary of r, counter-clockwise.
  double boundary_phase(const Rect& r, int nodes) {
    const std::array<std::complex<double>, 5> corners{
        std::complex<double>{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max},
        {r.re_min, r.im_max}, {r.re_min, r.im_min}};
    double total = 0.0;
    std::complex<double> zprev = corners[0];
    AnalyticSample fprev = eval(zprev);
    for (int e = 0; e < 4; ++e) {
      for (int j = 1; j <= nodes; ++j) {
        const double t = static_cast<double>(j) / nodes;
        const std::complex<double> z =
            (j == nodes) ? corners[e + 1] : corners[e] + t * (corners[e + 1] - corners[e]);
        const AnalyticSample fz = eval(z);
        total += segment_phase(zprev, fprev, z, fz, 0);
        zprev = z;
        fprev = fz;
      }
    }
    return total;
  }

  /// Number of zeros (with multiplicity) inside r; the count must agree under node doubling.
  int count(const Rect& r) {
    int nodes = std::max(opt_.nodes_per_side, 4);
    int previous = -1;
    for (int attempt = 0; attempt <= opt_.max_node_doublings; ++attempt, nodes *= 2) {
      const double w = boundary_phase(r, nodes) / (2.0 * std::numbers::pi);
      const double rounded = std::round(w);
      if (std::abs(w - rounded) < 0.25) {
        const int n = static_cast<int>(rounded);
        if (n == previous) return n;
        previous = n;
      } else {
        previous = -1;
      }
    }
    throw Error(ErrorCode::NoConvergence, "winding number did not stabilize");
  }

  bool newton(std::complex<double>& z, int order, const Rect& guard) {
    for (int it = 0; it < opt_.max_newton_iter; ++it) {
      const AnalyticSample s = f_(z);
      if (s.value == 0.0) return true;
      if (s.derivative == 0.0) return false;
      const std::complex<double> step = static_cast<double>(order) * s.value / s.derivative;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      if (z.real() < guard.re_min || z.real() > guard.re_max || z.imag() < guard.im_min ||
          z.imag() > guard.im_max)
        return false;
      if (std::abs(step) <= opt_.newton_tol * std::max(1.0, std::abs(z))) return true;
    }
    return false;
  }

  void process(const Rect& r, int n, int depth, std::vector<ContourZero>& out) {
    if (n <= 0) return;
    const double size = std::max(r.width(), r.height());
    std::complex<double> z = r.center();
    Rect guard{r.re_min - size, r.re_max + size, r.im_min - size, r.im_max + size};
    if (newton(z, n, guard) && r.contains(z)) {
      const double rad =
          std::max(1e-4 * std::min(r.width(), r.height()),
                   1e4 * opt_.newton_tol * std::max(1.0, std::abs(z)));
      Rect box{z.real() - rad, z.real() + rad, z.imag() - rad, z.imag() + rad};
      if (box.re_min > r.re_min && box.re_max < r.re_max && box.im_min > r.im_min &&
          box.im_max < r.im_max) {
        try {
          if (count(box) == n) {
            out.push_back({z, n});
            return;
          }
        } catch (const Error&) {
          // fall through to subdivision
        }
      }
    }
    if (depth >= opt_.max_subdivision_depth) {
      throw Error(ErrorCode::NoConvergence, "zero isolation did not converge");
    }
    static constexpr std::array<double, 7> kSplits{0.5, 0.4631, 0.5377, 0.4219, 0.5813, 0.3907, 0.6121};
    const bool vertical_cut = r.width() >= r.height();
    auto halves = [&](double frac) {
      Rect a = r, b = r;
      if (vertical_cut) {
        a.re_max = b.re_min = r.re_min + frac * r.width();
      } else {
        a.im_max = b.im_min = r.im_min + frac * r.height();
      }
      return std::pair{a, b};
    };
    for (double frac : kSplits) {
      const auto [a, b] = halves(frac);
      int na = 0, nb = 0, shifted = 0;
      try {
        na = count(a);
        nb = count(b);
        // a zero lying on the cut is split between both halves; a nearby cut disagrees then
        shifted = count(halves(frac + 1e-3).first);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ContourThroughZero) continue;
        throw;
      }
      if (na + nb != n || shifted != na) continue;
      process(a, na, depth + 1, out);
      process(b, nb, depth + 1, out);
      return;
    }
    // Tiny cell whose zeros cannot be separated by contours at double precision.
    if (size <= 1e-4 * std::max(1.0, std::abs(r.center()))) {
      resolve_cluster(r, n, guard, out);
      return;
    }
    throw Error(ErrorCode::NoConvergence, "could not split cell without crossing a zero");
  }

  /// Newton that stops when the step no longer shrinks; returns the point of smallest |f|
  /// and the last step length there as an accuracy estimate.
  bool polish(std::complex<double>& z, double& err, const Rect& guard) {
    std::complex<double> best = z;
    double best_abs = std::numeric_limits<double>::infinity(), best_step = best_abs, prev = best_abs;
    for (int it = 0; it < opt_.max_newton_iter; ++it) {
      const AnalyticSample s = f_(z);
      if (s.derivative == 0.0) break;
      const std::complex<double> step = s.value / s.derivative;
      if (std::abs(s.value) < best_abs) {
        best_abs = std::abs(s.value);
        best = z;
        best_step = std::abs(step);
      }
      if (s.value == 0.0 || std::abs(step) <= opt_.newton_tol * std::max(1.0, std::abs(z))) break;
      if (it > 4 && std::abs(step) >= prev) break;
      prev = std::abs(step);
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || z.real() < guard.re_min ||
          z.real() > guard.re_max || z.imag() < guard.im_min || z.imag() > guard.im_max)
        return false;
    }
    z = best;
    err = best_step;
    return std::isfinite(best_abs);
  }

  /// Separates the zeros of a tiny cell by Newton from a grid of starts; falls back to one
  /// zero of order n at the cluster centre.
  void resolve_cluster(const Rect& r, int n, const Rect& guard, std::vector<ContourZero>& out) {
    const std::complex<double> c = r.center();
    std::vector<std::pair<std::complex<double>, double>> found;
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        std::complex<double> z = c + std::complex<double>(0.3 * i * r.width(), 0.3 * j * r.height());
        double err = 0.0;
        if (!polish(z, err, guard) || !r.contains(z)) continue;
        const bool fresh = std::none_of(found.begin(), found.end(), [&](const auto& w) {
          return std::abs(w.first - z) <= 4.0 * std::max(w.second, err) + 1e3 * opt_.newton_tol * std::max(1.0, std::abs(z));
        });
        if (fresh) found.push_back({z, err});
      }
    }
    if (static_cast<int>(found.size()) == n) {
      for (const auto& w : found) out.push_back({w.first, 1});
      return;
    }
    std::complex<double> z = c;
    if (!newton(z, n, guard) || !r.contains(z)) z = c;
    out.push_back({z, n, 0.5 * std::hypot(r.width(), r.height())});
  }

 private:
  F& f_;
  ZeroSearchOptions opt_;
};

}  // namespace detail

/// Winding number of f around the boundary of r.
template <class F>
int count_zeros(F&& f, const Rect& r, const ZeroSearchOptions& opt = {}) {
  detail::ZeroFinder<std::remove_reference_t<F>> finder(f, opt);
  return finder.count(r);
}

/// All zeros of f strictly inside r, each with its order, sorted by real then imaginary part.
template <class F>
std::vector<ContourZero> find_zeros(F&& f, const Rect& r, const ZeroSearchOptions& opt = {}) {
  if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max)) {
    throw Error(ErrorCode::InvalidParams, "empty search rectangle");
  }
  detail::ZeroFinder<std::remove_reference_t<F>> finder(f, opt);
  std::vector<ContourZero> zeros;
  finder.process(r, finder.count(r), 0, zeros);
  std::sort(zeros.begin(), zeros.end(), [](const ContourZero& a, const ContourZero& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return zeros;
}

}  // namespace ptpoint
