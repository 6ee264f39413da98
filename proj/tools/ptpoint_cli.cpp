#include <CLI11.hpp>
#include <iostream>

#include "ptpoint/cli.hpp"

using namespace ptpoint;

int main(int argc, char** argv) {
  CLI::App app{"Spectra of PT-symmetric point interactions"};
  app.require_subcommand(1);

  cli::Options opt;
  std::string model;
  std::vector<double> contour;
  std::string variant;
  std::string dispersion = "printed";
  std::vector<double> k;
  std::vector<double> grid;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", model, "model file (JSON)")->required();
    sub->add_option("--tol", opt.tol, "relative tolerance for predicates and root tests");
    sub->add_option("--variant", variant, "delta-pair matrix: default | textbook-delta");
  };
  auto add_spectral = [&](CLI::App* sub) {
    sub->add_option("--contour", contour, "re_min re_max im_min im_max")->expected(4);
    sub->add_option("--dispersion", dispersion, "two-point relation: printed | determinant");
  };

  auto* classify = app.add_subcommand("classify", "PT / self-adjointness flags and family parameters");
  add_common(classify);

  auto* spectrum = app.add_subcommand("spectrum", "discrete spectrum from the dispersion relation");
  add_common(spectrum);
  add_spectral(spectrum);
  spectrum->add_option("--out", opt.out, "also write eigenvalues as CSV");

  auto* sweep = app.add_subcommand("sweep", "real-spectrum region map over 1 or 2 parameters");
  sweep->add_option("sweep", model, "sweep file (JSON)")->required();
  sweep->add_option("--out", opt.out, "CSV path (overrides the file's output)");
  sweep->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
  sweep->add_option("--tol", opt.tol, "relative tolerance");
  sweep->add_option("--variant", variant, "delta-pair matrix: default | textbook-delta");
  sweep->add_option("--dispersion", dispersion, "two-point relation: printed | determinant");

  auto* oracle = app.add_subcommand("oracle", "compare closed-form eigenvalues with finite differences");
  add_common(oracle);
  add_spectral(oracle);
  oracle->add_option("--L", opt.oracle.L, "half-width of the truncated domain");
  oracle->add_option("--N", opt.oracle.N, "number of grid nodes (even)");

  auto* eigen = app.add_subcommand("eigenfunction", "sample the eigenfunction at k as CSV");
  add_common(eigen);
  eigen->add_option("--k", k, "wave number re im")->expected(2)->required();
  eigen->add_option("--grid", grid, "L N of the sampling grid")->expected(2);
  eigen->add_option("--out", opt.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kParseError;
  }

  try {
    if (!variant.empty()) opt.variant = parse_variant(variant);
    if (dispersion == "determinant")
      opt.form = DispersionForm::Determinant;
    else if (dispersion != "printed")
      throw Error(ErrorCode::ParseError, "--dispersion: expected printed or determinant");
    if (!contour.empty()) {
      opt.contour = cli::contour_from({contour[0], contour[1], contour[2], contour[3]});
      opt.contour->validate();
    }
    if (!k.empty()) opt.k = {k[0], k[1]};
    if (!grid.empty()) {
      opt.grid_L = grid[0];
      opt.grid_N = static_cast<int>(grid[1]);
    }
  } catch (const Error& e) {
    std::cerr << "error [arguments]: " << e.what() << '\n';
    return cli::kParseError;
  }

  if (*classify) return cli::run_classify(model, opt, std::cout, std::cerr);
  if (*spectrum) return cli::run_spectrum(model, opt, std::cout, std::cerr);
  if (*sweep) return cli::run_sweep(model, opt, std::cout, std::cerr);
  if (*oracle) return cli::run_oracle(model, opt, std::cout, std::cerr);
  return cli::run_eigenfunction(model, opt, std::cout, std::cerr);
}
