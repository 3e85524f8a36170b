// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: predictable/slow feature extraction from CSV time
// series, the synthetic overfitting experiment, and the model-contract
// verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 input parse error,
// 3 numerical precondition failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pfa/csv.hpp"
#include "pfa/experiments.hpp"
#include "pfa/pfa.hpp"
#include "pfa/sfa.hpp"
#include "pfa/single_component.hpp"
#include "pfa/svg.hpp"

namespace {

using pfa::Index;
using pfa::Matrix;
using pfa::TimeSeries;
using pfa::Vector;

struct ExtractOptions {
  std::string input;
  std::string output_dir = ".";
  std::string method = "pfa";
  int r = 0;  // 0 = all components
  int p = 2;
  int delta = 1;
  int k = 0;
  int expansion_degree = 1;
  double threshold = 1e-10;
  double holdout = 0.0;
  int count = 1;
  std::string mode = "alternating";
};

struct ExperimentOptions {
  std::string output_dir = ".";
  std::vector<Index> samples = {1000, 2000};
  int runs = 150;
  std::vector<int> k_list;
  std::vector<Index> noise_dims;
  int r = 2;
  int p = 2;
  int delta = 1;
  double threshold = 1e-10;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool plot = false;
};

struct VerifyOptions {
  int trials = 20;
  std::string model = "linear";
  bool expect_violation = false;
  std::uint64_t seed = 1;
};

std::vector<std::string> numbered_names(const std::string& stem, Index count) {
  std::vector<std::string> names;
  for (Index i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

// Basis of the variance-bearing subspace of a sphered signal, read off the
// whitening matrix's nonzero eigenspaces. Empty when the signal is full rank.
Matrix kept_basis(const pfa::SpheringTransform& transform) {
  if (transform.kept_rank == transform.whitening.rows()) return Matrix();
  const pfa::SymmetricEig eig = pfa::eig_symmetric(transform.whitening);
  return eig.vectors.rightCols(transform.kept_rank);
}

int cmd_extract(const ExtractOptions& opt) {
  const TimeSeries raw = pfa::read_time_series_csv(opt.input);
  const pfa::ThresholdPolicy policy{opt.threshold};
  const pfa::Expansion expansion{opt.expansion_degree, raw.dim()};
  const TimeSeries expanded = pfa::expand(raw, expansion);
  const pfa::SpheringTransform transform = pfa::fit_sphering(expanded, policy);
  TimeSeries z = pfa::apply_sphering(transform, expanded);

  // Solve inside the kept subspace when sphering dropped directions;
  // redundant directions would otherwise rank as perfectly predictable.
  const Matrix basis = kept_basis(transform);
  if (basis.size() > 0) z = TimeSeries(basis.transpose() * z.data);
  const Index n = z.dim();

  const std::filesystem::path dir(opt.output_dir);
  std::filesystem::create_directories(dir);
  // buffered so a failing solve leaves no partial artifacts behind
  std::ostringstream summary;
  summary << "input = " << opt.input << "\n";
  summary << "method = " << opt.method << "\n";
  summary << "input_dim = " << raw.dim() << "\n";
  summary << "expanded_dim = " << expanded.dim() << "\n";
  summary << "kept_rank = " << transform.kept_rank << "\n";
  if (basis.size() > 0)
    summary << "note = signal reduced to the " << transform.kept_rank
            << "-dimensional variance-bearing subspace\n";
  summary << "samples = " << raw.samples() << "\n";

  const auto to_ambient = [&](const Matrix& a) { return basis.size() > 0 ? Matrix(basis * a) : a; };

  if (opt.method == "pfa") {
    pfa::PfaConfig cfg;
    cfg.r = opt.r == 0 ? static_cast<int>(n) : opt.r;
    cfg.p = opt.p;
    cfg.delta = opt.delta;
    cfg.k = opt.k;
    cfg.threshold = policy;
    cfg.holdout_fraction = opt.holdout;
    const pfa::ExtractionResult res = pfa::solve_pfa_k(z, cfg);
    const Matrix a_r = res.extraction();
    pfa::write_time_series_csv((dir / "features.csv").string(),
                               TimeSeries(a_r.transpose() * z.data), numbered_names("m", cfg.r));
    pfa::write_matrix_csv((dir / "matrix_A.csv").string(), to_ambient(a_r));
    pfa::write_matrix_csv((dir / "predictor_B.csv").string(), res.refitted->coefficients);
    summary << "r = " << cfg.r << "\np = " << cfg.p << "\ndelta = " << cfg.delta
            << "\nk = " << cfg.k << "\n";
    summary << "achieved_error = " << pfa::format_double(res.achieved_error) << "\n";
    summary << "objective = " << pfa::format_double(res.objective) << "\n";
    summary << "residual_eigenvalues =";
    for (Index i = 0; i < res.residual_eigenvalues.size(); ++i)
      summary << " " << pfa::format_double(res.residual_eigenvalues(i));
    summary << "\n";
    for (const auto& w : res.warnings) summary << "warning = " << w << "\n";
  } else if (opt.method == "sfa") {
    const int r = opt.r == 0 ? static_cast<int>(n) : opt.r;
    const pfa::SfaResult res = pfa::solve_sfa(z, r, policy);
    pfa::write_time_series_csv((dir / "features.csv").string(),
                               TimeSeries(res.A_r.transpose() * z.data), numbered_names("m", r));
    pfa::write_matrix_csv((dir / "matrix_A.csv").string(), to_ambient(res.A_r));
    summary << "r = " << r << "\n";
    summary << "slowness_eigenvalues =";
    for (Index i = 0; i < res.slowness.size(); ++i)
      summary << " " << pfa::format_double(res.slowness(i));
    summary << "\n";
  } else if (opt.method == "single") {
    const pfa::DeflationMode mode = opt.mode == "pfa-r1" ? pfa::DeflationMode::kPfaRankOne
                                                         : pfa::DeflationMode::kAlternating;
    const auto comps = pfa::extract_deflated(z, opt.p, opt.count, mode, policy);
    Matrix a(n, static_cast<Index>(comps.size()));
    Matrix b(static_cast<Index>(comps.size()), opt.p);
    for (size_t i = 0; i < comps.size(); ++i) {
      a.col(static_cast<Index>(i)) = comps[i].a;
      b.row(static_cast<Index>(i)) = comps[i].b;
    }
    pfa::write_time_series_csv((dir / "features.csv").string(), TimeSeries(a.transpose() * z.data),
                               numbered_names("m", a.cols()));
    pfa::write_matrix_csv((dir / "matrix_A.csv").string(), to_ambient(a));
    pfa::write_matrix_csv((dir / "predictor_B.csv").string(), b);
    summary << "count = " << comps.size() << "\np = " << opt.p << "\nmode = " << opt.mode << "\n";
    for (size_t i = 0; i < comps.size(); ++i) {
      summary << "component_" << i + 1 << "_error = " << pfa::format_double(comps[i].error);
      if (!comps[i].converged) summary << " (not converged)";
      if (comps[i].ambiguous) summary << " (ambiguous)";
      summary << "\n";
    }
  } else {
    throw CLI::ValidationError("--method must be pfa, sfa or single");
  }
  std::ofstream summary_file(dir / "summary.txt");
  summary_file << summary.str();
  if (!summary_file) throw std::runtime_error("write to summary.txt failed");
  return 0;
}

int cmd_experiment(const ExperimentOptions& opt) {
  std::vector<int> ks = opt.k_list;
  if (ks.empty())
    for (int k = 0; k <= 14; ++k) ks.push_back(k);
  std::vector<Index> dims = opt.noise_dims;
  if (dims.empty())
    for (Index d = 0; d <= 100; d += 10) dims.push_back(d);

  const std::filesystem::path dir(opt.output_dir);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "sweep.csv");
  if (!out) throw pfa::CsvError("cannot open sweep.csv for writing");

  std::vector<std::vector<pfa::ExperimentRecord>> blocks;
  for (Index samples : opt.samples) {
    pfa::SweepConfig cfg;
    cfg.base = pfa::reference_sine_spec(samples, pfa::derive_seed(opt.seed, {0xBA5E}));
    cfg.k_values = ks;
    cfg.noise_dims = dims;
    cfg.runs = opt.runs;
    cfg.core.r = opt.r;
    cfg.core.p = opt.p;
    cfg.core.delta = opt.delta;
    cfg.core.threshold = pfa::ThresholdPolicy{opt.threshold};
    cfg.master_seed = opt.seed;
    cfg.jobs = opt.jobs;
    blocks.push_back(pfa::run_sweep(cfg));
    out << "# lower_bound samples=" << samples << " value="
        << pfa::format_double(blocks.back().front().lower_bound) << "\n";
  }
  out << "noise_dim,k,samples,runs,mean_err,std_err,below_bound\n";
  for (const auto& block : blocks)
    for (const auto& r : block)
      out << r.noise_dim << "," << r.k << "," << r.samples << "," << r.runs << ","
          << pfa::format_double(r.mean_error) << "," << pfa::format_double(r.std_error) << ","
          << (r.below_bound ? 1 : 0) << "\n";
  if (!out) throw pfa::CsvError("write to sweep.csv failed");
  out.close();

  if (opt.plot) {
    for (size_t i = 0; i < blocks.size(); ++i) {
      const std::string name = "sweep_T" + std::to_string(opt.samples[i]) + ".svg";
      pfa::write_sweep_svg((dir / name).string(), blocks[i],
                           "extraction error vs noise dimension, T=" +
                               std::to_string(opt.samples[i]));
    }
  }
  return 0;
}

TimeSeries random_sphered_signal(std::uint64_t seed, Index n, Index t) {
  pfa::NormalSampler rng(seed);
  Matrix data = rng.matrix(n, t);
  // mild temporal structure so prediction problems are not pure noise
  for (Index c = 1; c < t; ++c) data.col(c) += 0.5 * data.col(c - 1);
  return pfa::sphere(TimeSeries(std::move(data)));
}

TimeSeries predictable_instance(std::uint64_t seed, Index noise_dims, Index t) {
  Matrix data(2 + noise_dims, t);
  const double center = (static_cast<double>(t) - 1.0) / 2.0;
  for (Index c = 0; c < t; ++c) {
    const double tt = static_cast<double>(c) - center;
    data(0, c) = std::sin(0.17 * tt);
    data(1, c) = std::sin(0.31 * tt);
  }
  pfa::NormalSampler rng(pfa::derive_seed(seed, {1}));
  data.bottomRows(noise_dims) = rng.matrix(noise_dims, t);
  const Matrix q = pfa::random_orthogonal(pfa::derive_seed(seed, {2}), 2 + noise_dims);
  return pfa::sphere(TimeSeries(q * data));
}

int cmd_verify(const VerifyOptions& opt) {
  std::unique_ptr<pfa::PredictionModel> model;
  if (opt.model == "linear") model = std::make_unique<pfa::LinearArModel>();
  else if (opt.model == "diagonal") model = std::make_unique<pfa::DiagonalArModel>();
  else if (opt.model == "zero") model = std::make_unique<pfa::ZeroModel>();
  else throw CLI::ValidationError("--model must be linear, diagonal or zero");

  const double tol = 1e-8;
  bool all_pass = true;

  pfa::AgnosticityReport worst;
  for (Index n : {Index{2}, Index{4}, Index{6}}) {
    const TimeSeries z = random_sphered_signal(pfa::derive_seed(opt.seed, {7, static_cast<std::uint64_t>(n)}), n, 400);
    const auto rep = pfa::verify_agnosticity(*model, z, opt.trials,
                                             pfa::derive_seed(opt.seed, {8, static_cast<std::uint64_t>(n)}), 2);
    worst.trials += rep.trials;
    worst.max_agnosticity_violation = std::max(worst.max_agnosticity_violation, rep.max_agnosticity_violation);
    worst.max_projective_violation = std::max(worst.max_projective_violation, rep.max_projective_violation);
    worst.max_consistency_violation = std::max(worst.max_consistency_violation, rep.max_consistency_violation);
  }
  const bool contract_ok = worst.passes(tol);
  all_pass = all_pass && contract_ok;
  std::cout << (contract_ok ? "PASS" : "FAIL") << " orthogonal-agnosticity: max violation "
            << pfa::format_double(worst.max_agnosticity_violation) << " (projective "
            << pfa::format_double(worst.max_projective_violation) << ") over " << worst.trials
            << " trials\n";
  std::cout << (worst.max_consistency_violation <= tol ? "PASS" : "FAIL")
            << " information-consistency: max violation "
            << pfa::format_double(worst.max_consistency_violation) << "\n";

  if (opt.model == "linear") {
    double worst_gap = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const TimeSeries z = predictable_instance(pfa::derive_seed(opt.seed, {9, s}), 3, 600);
      pfa::PfaConfig cfg;
      cfg.r = 2;
      cfg.p = 2;
      worst_gap = std::max(worst_gap, pfa::solve_relaxation(z, cfg).achieved_error);
    }
    const bool gap_ok = worst_gap <= 1e-8;
    all_pass = all_pass && gap_ok;
    std::cout << (gap_ok ? "PASS" : "FAIL") << " relaxation-gap: max achieved error on lossless instances "
              << pfa::format_double(worst_gap) << "\n";

    double worst_lemma = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const TimeSeries z = random_sphered_signal(pfa::derive_seed(opt.seed, {10, s}), 5, 500);
      pfa::PfaConfig cfg;
      cfg.r = 2;
      cfg.p = 2;
      const auto res = pfa::solve_pfa_k(z, cfg);
      const Matrix tilt = pfa::random_block_orthogonal(pfa::derive_seed(opt.seed, {11, s}), cfg.r,
                                                       z.dim() - cfg.r);
      const Matrix a2 = res.A * tilt;
      const TimeSeries m2(a2.leftCols(cfg.r).transpose() * z.data);
      const auto refit = pfa::fit_reduced(z, a2.leftCols(cfg.r), cfg.p, cfg.delta, cfg.threshold);
      const double err2 = pfa::prediction_error(refit, m2, m2);
      worst_lemma = std::max(worst_lemma,
                             std::abs(err2 - res.achieved_error) / std::max(1.0, res.achieved_error));
    }
    const bool lemma_ok = worst_lemma <= 1e-8;
    all_pass = all_pass && lemma_ok;
    std::cout << (lemma_ok ? "PASS" : "FAIL")
              << " partition-transform-invariance: max error change "
              << pfa::format_double(worst_lemma) << "\n";
  }

  if (opt.expect_violation) {
    const bool violated = !contract_ok;
    std::cout << (violated ? "PASS" : "FAIL") << " expected-violation: contract suite "
              << (violated ? "failed as expected" : "unexpectedly passed") << "\n";
    return violated ? 0 : 1;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"predictable feature analysis for multivariate time series"};
  app.require_subcommand(1);
  app.set_config("--config");

  ExtractOptions ext;
  auto* extract = app.add_subcommand("extract", "extract features from a CSV time series");
  extract->add_option("--input,-i", ext.input, "input CSV, one row per time step")->required();
  extract->add_option("--output-dir,-o", ext.output_dir, "output directory");
  extract->add_option("--method", ext.method, "pfa | sfa | single")
      ->check(CLI::IsMember({"pfa", "sfa", "single"}));
  extract->add_option("--r,-r", ext.r, "extracted components (0 = all)");
  extract->add_option("--p,-p", ext.p, "prediction order");
  extract->add_option("--delta", ext.delta, "lag step");
  extract->add_option("--k,-k", ext.k, "iterated-prediction horizon");
  extract->add_option("--expansion-degree", ext.expansion_degree, "monomial expansion degree (1 or 2)")
      ->check(CLI::Range(1, 2));
  extract->add_option("--threshold", ext.threshold, "relative eigenvalue cutoff");
  extract->add_option("--holdout", ext.holdout, "holdout fraction for error evaluation");
  extract->add_option("--count", ext.count, "components for --method single");
  extract->add_option("--mode", ext.mode, "single-component mode: alternating | pfa-r1")
      ->check(CLI::IsMember({"alternating", "pfa-r1"}));

  ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "noise-dimension x horizon robustness sweep");
  experiment->add_option("--output-dir,-o", exp.output_dir, "output directory");
  experiment->add_option("--samples", exp.samples, "sample counts")->delimiter(',');
  experiment->add_option("--runs", exp.runs, "runs per sweep cell");
  experiment->add_option("--k-list", exp.k_list, "horizons (default 0..14)")->delimiter(',');
  experiment->add_option("--noise-dims", exp.noise_dims, "added noise dimensions (default 0,10,..,100)")
      ->delimiter(',');
  experiment->add_option("--r,-r", exp.r, "extracted components");
  experiment->add_option("--p,-p", exp.p, "prediction order");
  experiment->add_option("--delta", exp.delta, "lag step");
  experiment->add_option("--threshold", exp.threshold, "relative eigenvalue cutoff");
  experiment->add_option("--seed", exp.seed, "master seed");
  experiment->add_option("--jobs", exp.jobs, "parallel runs (0 = all cores)");
  experiment->add_flag("--plot", exp.plot, "write one SVG per sample count");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "run the model-contract and solver property suites");
  verify->add_option("--trials", ver.trials, "random rotations per instance");
  verify->add_option("--model", ver.model, "linear | diagonal | zero")
      ->check(CLI::IsMember({"linear", "diagonal", "zero"}));
  verify->add_flag("--expect-violation", ver.expect_violation,
                   "succeed when the contract suite finds a violation");
  verify->add_option("--seed", ver.seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(extract)) return cmd_extract(ext);
    if (app.got_subcommand(experiment)) return cmd_experiment(exp);
    return cmd_verify(ver);
  } catch (const pfa::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
