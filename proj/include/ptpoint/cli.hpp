#pragma once

// Subcommand implementations behind the ptpoint command-line tool. Each returns the exit code.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ptpoint/model_io.hpp"
#include "ptpoint/oracle.hpp"
#include "ptpoint/spectral.hpp"
#include "ptpoint/states.hpp"

namespace ptpoint::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kDegenerate = 3,
  kSolverFailure = 4,
  kOracleMismatch = 5,
  kNotAnEigenvalue = 6,
};

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidParams:
      return kParseError;
    case ErrorCode::Degenerate:
    case ErrorCode::DegenerateIdenticallyZero:
    case ErrorCode::RankDeficient:
    case ErrorCode::NotInFamily:
      return kDegenerate;
    case ErrorCode::NotAnEigenvalue:
      return kNotAnEigenvalue;
    default:
      return kSolverFailure;
  }
}

struct Options {
  double tol = kDefaultTol;
  std::optional<ContourSpec> contour;
  std::optional<DeltaVariant> variant;
  DispersionForm form = DispersionForm::Printed;
  OracleConfig oracle;
  cplx k{0.0, 1.0};
  double grid_L = 10.0;
  int grid_N = 2000;
  std::string out;
  unsigned threads = 0;
};

inline ContourSpec contour_from(const std::array<double, 4>& a) {
  ContourSpec c;
  c.re_min = a[0];
  c.re_max = a[1];
  c.im_min = a[2];
  c.im_max = a[3];
  return c;
}

inline InteractionSpec load_for_cli(const std::string& path, const Options& o) {
  InteractionSpec spec = load_model(path);
  if (auto* d = std::get_if<DeltaPair>(&spec); d && o.variant) d->variant = *o.variant;
  validate(spec, o.tol);
  return spec;
}

inline SpectrumOptions spectrum_options(const Options& o) { return {o.tol, o.contour, o.form}; }

/// Runs body, mapping library errors to exit codes and diagnostics on err.
template <class Body>
int guarded(const char* stage, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return kSolverFailure;
  }
}

inline json to_json(cplx z) { return io_detail::to_json(z); }

inline json report_to_json(const ClassificationReport& r) {
  json j{{"pt_selfadjoint", r.pt_selfadjoint}, {"selfadjoint", r.selfadjoint}, {"family", to_string(r.family)}};
  if (r.type_I)
    j["type_I"] = {{"theta", r.type_I->theta}, {"phi", r.type_I->phi}, {"b", r.type_I->b}, {"c", r.type_I->c}};
  if (r.type_II) j["type_II"] = {{"theta", r.type_II->theta}, {"h0", r.type_II->h0}, {"h1", r.type_II->h1}};
  if (r.form_cd)
    j["form_cd"] = {{"a", r.form_cd->a}, {"b", r.form_cd->b}, {"theta", r.form_cd->theta}, {"phi", r.form_cd->phi}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline json report_to_json(const SpectrumReport& r) {
  json ev = json::array();
  for (const auto& e : r.eigenvalues)
    ev.push_back({{"lambda", to_json(e.lambda)},
                  {"k", to_json(e.k.k)},
                  {"multiplicity", e.multiplicity},
                  {"kind", to_string(e.kind)}});
  json np = json::array();
  for (cplx z : r.nonphysical_roots) np.push_back(to_json(z));
  return {{"ac_branch", {{"start", r.ac_branch.start}}},
          {"eigenvalues", ev},
          {"nonphysical_roots", np},
          {"all_real", r.all_real}};
}

inline int run_classify(const std::string& model_path, const Options& o, std::ostream& out, std::ostream& err) {
  InteractionSpec spec;
  if (int rc = guarded("parse", err, [&] { spec = load_for_cli(model_path, o); return 0; })) return rc;
  return guarded("classify", err, [&] {
    out << report_to_json(classify(spec, o.tol)).dump(2) << '\n';
    return 0;
  });
}

inline int run_spectrum(const std::string& model_path, const Options& o, std::ostream& out, std::ostream& err) {
  InteractionSpec spec;
  if (int rc = guarded("parse", err, [&] { spec = load_for_cli(model_path, o); return 0; })) return rc;
  return guarded("spectrum", err, [&] {
    const SpectrumReport r = compute_spectrum(spec, spectrum_options(o));
    out << report_to_json(r).dump(2) << '\n';
    if (!o.out.empty()) {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::InvalidParams, "cannot write '" + o.out + "'");
      f << "lambda_re,lambda_im,k_re,k_im,multiplicity,kind\n";
      for (const auto& e : r.eigenvalues)
        f << format_double(e.lambda.real()) << ',' << format_double(e.lambda.imag()) << ','
          << format_double(e.k.k.real()) << ',' << format_double(e.k.k.imag()) << ',' << e.multiplicity << ','
          << to_string(e.kind) << '\n';
    }
    return 0;
  });
}

struct SweepRow {
  std::vector<double> params;
  bool all_real = false;
  int count = 0;
  std::string error;
  std::vector<cplx> eigenvalues;
};

inline SweepRow sweep_point(const SweepSpec& s, std::size_t i, const Options& o) {
  SweepRow row;
  row.params = s.point(i);
  try {
    InteractionSpec spec = parse_model(s.model_at(i));
    if (auto* d = std::get_if<DeltaPair>(&spec); d && o.variant) d->variant = *o.variant;
    SpectrumOptions so = spectrum_options(o);
    if (s.contour) so.contour = contour_from(*s.contour);
    const SpectrumReport r = compute_spectrum(spec, so);
    row.all_real = r.all_real;
    row.count = r.total_multiplicity();
    for (const auto& e : r.eigenvalues)
      for (int m = 0; m < e.multiplicity; ++m) row.eigenvalues.push_back(e.lambda);
  } catch (const Error& e) {
    row.error = to_string(e.code());
  }
  return row;
}

/// CSV region map: one row per grid point in row-major order (last parameter fastest).
inline std::string sweep_csv(const SweepSpec& s, const Options& o) {
  const std::size_t n = s.point_count();
  std::vector<SweepRow> rows(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) rows[i] = sweep_point(s, i, o);
  };
  const unsigned hw = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.eigenvalues.size());
  std::ostringstream csv;
  for (const auto& p : s.parameters) csv << p.name << ',';
  csv << "all_real,eigenvalue_count,error";
  for (std::size_t e = 0; e < width; ++e) csv << ",lambda" << e + 1 << "_re,lambda" << e + 1 << "_im";
  csv << '\n';
  for (const auto& r : rows) {
    for (double v : r.params) csv << format_double(v) << ',';
    csv << (r.error.empty() ? (r.all_real ? "1" : "0") : "") << ',' << (r.error.empty() ? std::to_string(r.count) : "")
        << ',' << r.error;
    for (std::size_t e = 0; e < width; ++e) {
      if (e < r.eigenvalues.size())
        csv << ',' << format_double(r.eigenvalues[e].real()) << ',' << format_double(r.eigenvalues[e].imag());
      else
        csv << ",,";
    }
    csv << '\n';
  }
  return csv.str();
}

inline int run_sweep(const std::string& sweep_path, const Options& o, std::ostream& out, std::ostream& err) {
  SweepSpec s;
  if (int rc = guarded("parse", err, [&] { s = parse_sweep(read_json_file(sweep_path)); return 0; })) return rc;
  return guarded("sweep", err, [&] {
    const std::string csv = sweep_csv(s, o);
    const std::string path = o.out.empty() ? s.output : o.out;
    if (path.empty()) {
      out << csv;
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorCode::InvalidParams, "cannot write '" + path + "'");
      f << csv;
      out << "wrote " << s.point_count() << " rows to " << path << '\n';
    }
    return 0;
  });
}

struct OracleComparison {
  struct Match {
    cplx closed;
    std::optional<cplx> oracle;
    double diff = 0.0;
    bool ok = false;
  };
  std::vector<Match> matches;
  /// Unmatched oracle eigenvalues with Re < -drop_tol.
  std::vector<cplx> extras;
  bool ok = true;
};

/// Pairs every closed-form eigenvalue (repeated by multiplicity) with the nearest unused oracle
/// eigenvalue; tolerance max(1e-3, 10 h^2 |lambda|).
inline OracleComparison compare_with_oracle(const SpectrumReport& closed, const std::vector<cplx>& oracle,
                                            const OracleConfig& cfg) {
  OracleComparison c;
  std::vector<bool> used(oracle.size(), false);
  const double h = 2.0 * cfg.L / cfg.N;
  for (const auto& e : closed.eigenvalues) {
    for (int m = 0; m < e.multiplicity; ++m) {
      OracleComparison::Match mt{e.lambda, std::nullopt, 0.0, false};
      std::size_t best = oracle.size();
      for (std::size_t i = 0; i < oracle.size(); ++i)
        if (!used[i] && (best == oracle.size() || std::abs(oracle[i] - e.lambda) < std::abs(oracle[best] - e.lambda)))
          best = i;
      if (best < oracle.size()) {
        mt.oracle = oracle[best];
        mt.diff = std::abs(oracle[best] - e.lambda);
        mt.ok = mt.diff <= std::max(1e-3, 10.0 * h * h * std::abs(e.lambda));
        if (mt.ok) used[best] = true;
      }
      c.ok = c.ok && mt.ok;
      c.matches.push_back(mt);
    }
  }
  for (std::size_t i = 0; i < oracle.size(); ++i)
    if (!used[i] && oracle[i].real() < -cfg.drop_tol) c.extras.push_back(oracle[i]);
  c.ok = c.ok && c.extras.empty();
  return c;
}

inline int run_oracle(const std::string& model_path, const Options& o, std::ostream& out, std::ostream& err) {
  InteractionSpec spec;
  if (int rc = guarded("parse", err, [&] { spec = load_for_cli(model_path, o); return 0; })) return rc;
  SpectrumReport closed;
  if (int rc = guarded("spectrum", err, [&] { closed = compute_spectrum(spec, spectrum_options(o)); return 0; }))
    return rc;
  std::vector<cplx> oracle;
  if (int rc = guarded("oracle", err, [&] { oracle = oracle_discrete_spectrum(spec, o.oracle); return 0; }))
    return rc;
  const OracleComparison c = compare_with_oracle(closed, oracle, o.oracle);
  out << "# oracle L = " << format_double(o.oracle.L) << ", N = " << o.oracle.N << '\n';
  out << "closed_re,closed_im,oracle_re,oracle_im,abs_diff,match\n";
  for (const auto& m : c.matches) {
    out << format_double(m.closed.real()) << ',' << format_double(m.closed.imag()) << ',';
    if (m.oracle)
      out << format_double(m.oracle->real()) << ',' << format_double(m.oracle->imag()) << ',' << format_double(m.diff);
    else
      out << ",,";
    out << ',' << (m.ok ? "yes" : "no") << '\n';
  }
  for (cplx z : c.extras) out << ",," << format_double(z.real()) << ',' << format_double(z.imag()) << ",,extra\n";
  if (!c.ok) {
    err << "error [oracle]: closed-form and finite-difference spectra disagree\n";
    return kOracleMismatch;
  }
  return kOk;
}

inline int run_eigenfunction(const std::string& model_path, const Options& o, std::ostream& out, std::ostream& err) {
  InteractionSpec spec;
  if (int rc = guarded("parse", err, [&] { spec = load_for_cli(model_path, o); return 0; })) return rc;
  return guarded("eigenfunction", err, [&] {
    PiecewiseExp psi;
    int multiplicity = 1;
    if (const auto* s = std::get_if<ConnectedOrigin>(&spec)) {
      psi = eigenfunction_origin(s->B, o.k);
    } else if (const auto* s = std::get_if<SeparatedOrigin>(&spec)) {
      const auto basis = eigenfunction_separated(s->p, o.k);
      psi = basis.front();
      multiplicity = static_cast<int>(basis.size());
    } else if (const auto* s = std::get_if<TwoPoint>(&spec)) {
      psi = eigenfunction_two_point(s->B, s->l, o.k);
    } else {
      const auto& d = std::get<DeltaPair>(spec);
      psi = eigenfunction_two_point(interface_matrix(d), d.l, o.k);
    }
    double itf = 0.0;
    for (const auto& i : interfaces_of(spec)) itf = std::max(itf, interface_residual(psi, i));
    std::ostringstream csv;
    csv << "# k = " << format_double(o.k.real()) << ' ' << format_double(o.k.imag()) << '\n';
    csv << "# lambda = " << format_double((o.k * o.k).real()) << ' ' << format_double((o.k * o.k).imag()) << '\n';
    csv << "# pieces = " << psi.pieces.size() << '\n';
    if (multiplicity > 1) csv << "# multiplicity = " << multiplicity << " (first basis function shown)\n";
    csv << "# interface_residual = " << format_double(itf) << '\n';
    csv << "# pt_defect = " << format_double(pt_symmetry_defect(psi)) << '\n';
    csv << "x,re,im\n";
    const GridFunction g = GridFunction::sample(o.grid_L, o.grid_N, psi);
    for (int j = 0; j < g.N; ++j)
      csv << format_double(g.x(j)) << ',' << format_double(g.values[j].real()) << ','
          << format_double(g.values[j].imag()) << '\n';
    if (o.out.empty()) {
      out << csv.str();
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::InvalidParams, "cannot write '" + o.out + "'");
      f << csv.str();
    }
    return 0;
  });
}

}  // namespace ptpoint::cli
