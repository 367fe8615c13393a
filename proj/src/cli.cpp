#include "tdrc/cli.hpp"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tdrc/cp_als.hpp"
#include "tdrc/cross_validation.hpp"
#include "tdrc/errors.hpp"
#include "tdrc/io.hpp"
#include "tdrc/metrics.hpp"
#include "tdrc/similarity.hpp"
#include "tdrc/tdrc.hpp"

namespace tdrc::cli {

namespace fs = std::filesystem;

namespace {

/// Input problem detected before any computation; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = ".";
  bool verbose = false;
};

struct DataOptions {
  std::string triplets;
  std::size_t min_assoc = 0;
};

struct SimOptions {
  DataOptions data;
  std::string dag;
  double delta = 0.5;
};

struct FitOptions {
  DataOptions data;
  std::string sim_mirna, sim_disease;
  std::string method = "tdrc";
  Hyperparams hp;
};

struct CvOptions {
  FitOptions fit;
  std::string protocol = "type";
  int folds = 10;
  std::string aggregate = "fold";
};

struct PredictOptions {
  DataOptions data;
  std::string model;
  std::string disease;
  bool all = false;
  std::size_t top = 20;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " file not found: " + path);
}

fs::path prepare_out_dir(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory: " + g.out_dir);
  return dir;
}

Dataset load_dataset(const DataOptions& d, std::ostream& err) {
  Dataset ds = io::load_triplets(d.triplets);
  if (ds.duplicates_dropped > 0) err << "warning: dropped " << ds.duplicates_dropped << " duplicate association rows\n";
  if (d.min_assoc > 0) ds = io::filter_min_associations(ds, d.min_assoc);
  if (ds.triplets.empty()) throw UsageError("no associations left after filtering");
  return ds;
}

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--triplets", d.triplets, "Association TSV (miRNA, disease, type)")->required();
  cmd->add_option("--min-assoc", d.min_assoc,
                  "Drop miRNAs and diseases with fewer associations than this (0 = keep all)");
}

void add_hyper_options(CLI::App* cmd, Hyperparams& hp) {
  cmd->add_option("-r,--rank", hp.rank, "Decomposition rank")->capture_default_str();
  cmd->add_option("--alpha", hp.alpha, "miRNA similarity weight")->capture_default_str();
  cmd->add_option("--beta", hp.beta, "Disease similarity weight")->capture_default_str();
  cmd->add_option("--lambda", hp.lambda, "Ridge on the projection matrices")->capture_default_str();
  cmd->add_option("--mu", hp.mu, "Penalty growth factor")->capture_default_str();
  cmd->add_option("--rho-init", hp.rho_init, "Initial penalty")->capture_default_str();
  cmd->add_option("--rho-cap", hp.rho_cap, "Penalty cap")->capture_default_str();
  cmd->add_option("--tol", hp.tol, "Outer convergence tolerance")->capture_default_str();
  cmd->add_option("--max-iter", hp.max_iter, "Outer iteration cap")->capture_default_str();
  cmd->add_option("--cg-tol", hp.cg_tol, "Relative CG tolerance on the squared residual")->capture_default_str();
  cmd->add_option("--cg-max-iter", hp.cg_max_iter, "CG iteration cap")->capture_default_str();
  cmd->add_flag("--allow-high-rank", hp.allow_high_rank, "Permit rank above min(#miRNA, #disease)");
}

void add_fit_options(CLI::App* cmd, FitOptions& f) {
  add_data_options(cmd, f.data);
  cmd->add_option("--sim-mirna", f.sim_mirna, "miRNA similarity TSV");
  cmd->add_option("--sim-disease", f.sim_disease, "Disease similarity TSV");
  cmd->add_option("--method", f.method, "tdrc or cp")
      ->check(CLI::IsMember({"tdrc", "cp"}))
      ->capture_default_str();
  add_hyper_options(cmd, f.hp);
}

Method parse_method(const std::string& m) { return m == "cp" ? Method::kCp : Method::kTdrc; }

/// Validates every input path of a fit-like command.
void check_fit_paths(const FitOptions& f, std::ostream& err) {
  require_file(f.data.triplets, "triplets");
  if (parse_method(f.method) == Method::kCp) {
    if (!f.sim_mirna.empty() || !f.sim_disease.empty()) err << "warning: --method cp ignores similarity matrices\n";
    return;
  }
  const bool needs_sims = f.hp.alpha != 0.0 || f.hp.beta != 0.0;
  if (needs_sims || !f.sim_mirna.empty()) require_file(f.sim_mirna, "miRNA similarity");
  if (needs_sims || !f.sim_disease.empty()) require_file(f.sim_disease, "disease similarity");
}

/// Similarity matrices aligned to the dataset; zero matrices when not supplied.
std::pair<Matrix, Matrix> load_sims(const FitOptions& f, const Dataset& ds) {
  if (parse_method(f.method) == Method::kCp) return {Matrix::Zero(ds.m(), ds.m()), Matrix::Zero(ds.n(), ds.n())};
  Matrix s_m = f.sim_mirna.empty() ? Matrix::Zero(ds.m(), ds.m())
                                   : io::align_similarity(io::load_similarity(f.sim_mirna), ds.mirnas);
  Matrix s_n = f.sim_disease.empty() ? Matrix::Zero(ds.n(), ds.n())
                                     : io::align_similarity(io::load_similarity(f.sim_disease), ds.diseases);
  return {std::move(s_m), std::move(s_n)};
}

int cmd_sim(const GlobalOptions& g, const SimOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.data.triplets, "triplets");
  require_file(o.dag, "disease hierarchy");
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  const auto dir = prepare_out_dir(g);

  const Dataset ds = load_dataset(o.data, err);
  const DiseaseDag dag = io::load_dag(o.dag);
  const auto built = build_similarity_matrices(ds, dag, SimParams{o.delta});
  for (const auto& w : built.warnings) err << "warning: " << w << '\n';
  built.mirna.validate();
  built.disease.validate();
  io::save_similarity(built.mirna, dir / "mirna_similarity.tsv");
  io::save_similarity(built.disease, dir / "disease_similarity.tsv");

  std::ofstream stats(dir / "sim_stats.tsv");
  stats << "matrix\tsize\tmean_offdiag\tmissing_in_hierarchy\n";
  auto mean_off = [](const Matrix& s) {
    const auto n = static_cast<double>(s.rows());
    return n > 1 ? (s.sum() - s.trace()) / (n * (n - 1)) : 0.0;
  };
  stats << "mirna\t" << built.mirna.size() << '\t' << mean_off(built.mirna.values) << "\t0\n";
  stats << "disease\t" << built.disease.size() << '\t' << mean_off(built.disease.values) << '\t'
        << built.warnings.size() << '\n';
  out << "wrote " << (dir / "mirna_similarity.tsv").string() << " (" << built.mirna.size() << "x"
      << built.mirna.size() << ") and " << (dir / "disease_similarity.tsv").string() << " (" << built.disease.size()
      << "x" << built.disease.size() << ")\n";
  return kExitOk;
}

int cmd_fit(const GlobalOptions& g, FitOptions o, std::ostream& out, std::ostream& err) {
  check_fit_paths(o, err);
  o.hp.seed = g.seed;
  o.hp.validate();
  const auto dir = prepare_out_dir(g);

  const Dataset ds = load_dataset(o.data, err);
  const auto [s_m, s_n] = load_sims(o, ds);
  const Tensor3 x = ds.to_tensor();

  io::Model model;
  model.method = parse_method(o.method);
  model.hp = o.hp;
  std::vector<IterationRecord> history;
  if (model.method == Method::kCp) {
    const auto res = cp_als_fit(x, CpOptions{o.hp.rank, o.hp.tol, o.hp.max_iter, o.hp.seed, o.hp.allow_high_rank});
    model.factors = res.factors;
    model.M1 = model.M2 = Matrix::Zero(o.hp.rank, o.hp.rank);
    for (std::size_t s = 1; s < res.residual_history.size(); ++s) {
      const double obj = 0.5 * res.residual_history[s] * res.residual_history[s];
      IterationRecord rec;
      rec.iteration = static_cast<int>(s);
      rec.objective = obj;
      history.push_back(rec);
    }
  } else {
    auto log = [&](const IterationRecord& r) {
      if (g.verbose)
        err << "iter " << r.iteration << " objective " << std::setprecision(10) << r.objective << " primal "
            << r.primal_c << ' ' << r.primal_p << " rho " << r.rho1 << '\n';
    };
    auto res = tdrc_fit(x, s_m, s_n, o.hp, log);
    model.factors = std::move(res.factors);
    model.M1 = std::move(res.M1);
    model.M2 = std::move(res.M2);
    history = std::move(res.history);
    if (!res.converged) err << "warning: reached --max-iter without meeting the convergence tolerance\n";
  }
  io::save_model(model, dir / "model.bin");
  std::ofstream hist(dir / "history.tsv");
  io::write_history(history, hist);
  const double residual = residual_norm(x, model.factors);
  out << "method\t" << o.method << "\niterations\t" << history.size() << "\nresidual_norm\t"
      << std::setprecision(17) << residual << "\nmodel\t" << (dir / "model.bin").string() << '\n';
  return kExitOk;
}

int cmd_cv(const GlobalOptions& g, CvOptions o, std::ostream& out, std::ostream& err) {
  check_fit_paths(o.fit, err);
  if (o.folds < 2) throw UsageError("--folds must be at least 2");
  o.fit.hp.seed = g.seed;
  o.fit.hp.validate();
  const auto dir = prepare_out_dir(g);

  const Dataset ds = load_dataset(o.fit.data, err);
  const auto [s_m, s_n] = load_sims(o.fit, ds);
  CvConfig cfg;
  cfg.protocol = o.protocol == "triplet" ? Protocol::kTriplet : Protocol::kType;
  cfg.method = parse_method(o.fit.method);
  cfg.k = o.folds;
  cfg.seed = g.seed;
  cfg.hp = o.fit.hp;
  cfg.jobs = g.jobs;
  const CvReport report = run_cv(ds, s_m, s_n, cfg);

  const auto tsv_path = dir / ("cv_" + o.protocol + ".tsv");
  std::ofstream tsv(tsv_path);
  tsv << "fold\ttest_size";
  for (const auto& name : report.metric_names) tsv << '\t' << name;
  tsv << '\n' << std::setprecision(17);
  auto row = [&](const std::string& label, const std::string& size, const std::vector<double>& v) {
    tsv << label << '\t' << size;
    for (double x : v) tsv << '\t' << x;
    tsv << '\n';
  };
  for (std::size_t f = 0; f < report.per_fold.size(); ++f)
    row(std::to_string(f + 1), std::to_string(report.fold_sizes[f]), report.per_fold[f]);
  row("mean", "", report.mean);
  row("pooled", "", report.pooled);

  out << "CV_" << o.protocol << " (" << o.fit.method << ", k=" << o.folds << ", seed=" << g.seed << ")\n";
  out << std::left << std::setw(8) << "fold" << std::setw(10) << "size";
  for (const auto& name : report.metric_names) out << std::setw(12) << name;
  out << '\n' << std::fixed << std::setprecision(4);
  auto print = [&](const std::string& label, const std::string& size, const std::vector<double>& v) {
    out << std::setw(8) << label << std::setw(10) << size;
    for (double x : v) out << std::setw(12) << x;
    out << '\n';
  };
  for (std::size_t f = 0; f < report.per_fold.size(); ++f)
    print(std::to_string(f + 1), std::to_string(report.fold_sizes[f]), report.per_fold[f]);
  const bool pooled = o.aggregate == "pooled";
  print(pooled ? "pooled" : "mean", "", pooled ? report.pooled : report.mean);
  out << "wrote " << tsv_path.string() << '\n';
  return kExitOk;
}

int cmd_predict(const GlobalOptions& g, const PredictOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.model, "model");
  require_file(o.data.triplets, "triplets");
  if (o.all == !o.disease.empty()) throw UsageError("give exactly one of --disease or --all");
  if (o.top == 0) throw UsageError("--top must be positive");
  const auto dir = prepare_out_dir(g);

  const Dataset ds = load_dataset(o.data, err);
  const io::Model model = io::load_model(o.model);
  if (model.factors.dims() != std::array<Index, 3>{ds.m(), ds.n(), ds.t()})
    throw UsageError("model dimensions do not match the dataset (was it filtered the same way?)");
  std::vector<Index> diseases;
  if (o.all) {
    for (Index j = 0; j < ds.n(); ++j) diseases.push_back(j);
  } else {
    auto j = ds.diseases.find(o.disease);
    if (!j) throw UsageError("unknown disease id: " + o.disease);
    diseases.push_back(*j);
  }
  const Tensor3 scores = predict_scores(model.factors);
  std::vector<io::DiseaseRanking> rankings;
  for (Index j : diseases) rankings.push_back({j, rank_for_disease(scores, j, ds.triplets, o.top)});
  const auto path = dir / "predictions.tsv";
  io::export_predictions(rankings, ds, path);
  out << "wrote " << path.string() << " (" << rankings.size() << " diseases, top " << o.top << ")\n";
  return kExitOk;
}

int cmd_stats(const DataOptions& d, std::ostream& out, std::ostream& err) {
  require_file(d.triplets, "triplets");
  const Dataset ds = load_dataset(d, err);
  const auto s = io::dataset_stats(ds);
  char density[32];
  std::snprintf(density, sizeof density, "%.3f%%", 100.0 * s.density);
  out << "mirnas\tdiseases\ttypes\ttriplets\tdensity\n"
      << s.mirnas << '\t' << s.diseases << '\t' << s.types << '\t' << s.triplets << '\t' << density << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor completion of multi-type miRNA-disease associations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random substream")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", g.verbose, "Log optimizer progress to stderr");

  SimOptions sim;
  auto* sim_cmd = app.add_subcommand("sim", "Build miRNA and disease similarity matrices");
  add_data_options(sim_cmd, sim.data);
  sim_cmd->add_option("--dag", sim.dag, "Disease hierarchy TSV (disease, tree number)")->required();
  sim_cmd->add_option("--delta", sim.delta, "Semantic contribution factor")->capture_default_str();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on all known associations");
  add_fit_options(fit_cmd, fit);

  CvOptions cv;
  auto* cv_cmd = app.add_subcommand("cv", "Run k-fold cross validation");
  add_fit_options(cv_cmd, cv.fit);
  cv_cmd->add_option("--protocol", cv.protocol, "type or triplet")
      ->check(CLI::IsMember({"type", "triplet"}))
      ->capture_default_str();
  cv_cmd->add_option("-k,--folds", cv.folds, "Number of folds")->capture_default_str();
  cv_cmd->add_option("--aggregate", cv.aggregate, "fold (mean of per-fold metrics) or pooled")
      ->check(CLI::IsMember({"fold", "pooled"}))
      ->capture_default_str();

  PredictOptions pred;
  auto* pred_cmd = app.add_subcommand("predict", "Rank unknown (miRNA, type) pairs per disease");
  add_data_options(pred_cmd, pred.data);
  pred_cmd->add_option("--model", pred.model, "Model file written by fit")->required();
  pred_cmd->add_option("--disease", pred.disease, "Disease identifier");
  pred_cmd->add_flag("--all", pred.all, "Rank every disease");
  pred_cmd->add_option("--top", pred.top, "Predictions per disease")->capture_default_str();

  DataOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Print dataset statistics");
  add_data_options(stats_cmd, stats);

  for (auto* cmd : {sim_cmd, fit_cmd, cv_cmd, pred_cmd, stats_cmd}) cmd->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  omp_set_num_threads(g.jobs);
  try {
    if (*sim_cmd) return cmd_sim(g, sim, out, err);
    if (*fit_cmd) return cmd_fit(g, fit, out, err);
    if (*cv_cmd) return cmd_cv(g, cv, out, err);
    if (*pred_cmd) return cmd_predict(g, pred, out, err);
    return cmd_stats(stats, out, err);
  } catch (const DivergenceError& e) {
    err << "error: optimization diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tdrc::cli
