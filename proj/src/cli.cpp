#include "ksos/cli.hpp"

#include "ksos/csv.hpp"
#include "ksos/harness.hpp"
#include "ksos/report.hpp"
#include "ksos/rho.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ksos {

namespace {

namespace fs = std::filesystem;

/// Raised for bad flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::string config_path;
  std::string system;
  std::vector<std::string> overrides;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    cmd.add_option("--system", system, "System when no config is given: logistic, henon or lorenz");
    cmd.add_option("--set", overrides, "Override a config key, e.g. --set sos.barrier_eps=1e-6")
        ->take_all()
        ->allow_extra_args(false);
  }

  ExperimentConfig load() const {
    std::vector<std::string> all;
    if (!system.empty()) all.push_back("system.name=\"" + system + "\"");
    all.insert(all.end(), overrides.begin(), overrides.end());
    ExperimentConfig cfg = config_path.empty() ? parse_config("{}", all) : load_config(config_path, all);
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return cfg;
  }
};

Vector parse_vector(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_params(const KernelParams& p) {
  std::string s;
  for (int k = 0; k < kNumParams; ++k) s += (k ? "," : "") + format_double(p[k]);
  return s;
}

std::vector<FittedInterpolant> fit_all(const std::vector<KernelParams>& thetas, const Dataset& train) {
  std::vector<FittedInterpolant> models;
  for (Eigen::Index d = 0; d < train.output_dim(); ++d) {
    try {
      models.push_back(fit(thetas[static_cast<std::size_t>(d)], Dataset{train.X, train.Y.col(d)}));
    } catch (const std::exception& e) {
      throw NumericalError("fit on dimension " + std::to_string(d + 1) + ": " + e.what());
    }
  }
  return models;
}

/// Parameter rows from a CSV with theta_1..theta_10 columns: one row per output
/// dimension or one row for all. Files with method/seed/dim columns (such as
/// raw_runs.csv) are filtered to the requested method and seed.
std::vector<KernelParams> read_params_csv(const fs::path& path, int dims, const std::string& method,
                                          std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read parameters '" + path.string() + "'");
  const CsvTable table = read_csv(in);
  if (table.empty()) throw ConfigError("parameter file '" + path.string() + "' is empty");
  const auto& header = table.front();
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return static_cast<std::ptrdiff_t>(c);
    }
    return -1;
  };
  std::vector<std::size_t> theta_cols;
  for (int k = 1; k <= kNumParams; ++k) {
    const auto c = column("theta_" + std::to_string(k));
    if (c < 0) throw ConfigError("parameter file lacks column theta_" + std::to_string(k));
    theta_cols.push_back(static_cast<std::size_t>(c));
  }
  const auto method_col = column("method");
  const auto seed_col = column("seed");

  std::vector<KernelParams> out;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != header.size()) throw ConfigError("parameter file row " + std::to_string(r) + " is ragged");
    if (method_col >= 0 && row[static_cast<std::size_t>(method_col)] != method) continue;
    if (seed_col >= 0 && row[static_cast<std::size_t>(seed_col)] != std::to_string(seed)) continue;
    ParamVector v;
    try {
      for (int k = 0; k < kNumParams; ++k) v[k] = parse_double(row[theta_cols[static_cast<std::size_t>(k)]]);
    } catch (const std::exception&) {
      throw ConfigError("parameter file row " + std::to_string(r) + " has a missing or invalid value");
    }
    out.emplace_back(v);
  }
  if (out.size() == 1) out.resize(static_cast<std::size_t>(dims), out.front());
  if (out.size() != static_cast<std::size_t>(dims)) {
    throw ConfigError("parameter file has " + std::to_string(out.size()) + " matching rows, expected 1 or " +
                      std::to_string(dims));
  }
  return out;
}

void print_metrics(std::ostream& out, const char* split, const TrajectoryMetrics& m) {
  out << split << " mean_error=" << format_optional(m.mean_error) << " hausdorff=" << format_optional(m.hausdorff);
  for (const auto& [gamma, v] : m.deviation) {
    out << " deviation_" << format_double(gamma) << "=" << (v ? std::to_string(*v) : "NONE");
  }
  out << "\n";
}

fs::path default_out_dir() {
  const char* env = std::getenv("KSOS_OUT_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("results");
}

void print_manifest(std::ostream& out, const std::vector<fs::path>& manifest) {
  for (const auto& p : manifest) out << p.string() << "\n";
}

/// Names every failed cell on err; returns true if there was one.
bool report_failures(const ExperimentReport& report, std::ostream& err) {
  bool failed = false;
  for (const OptRecord& r : report.runs) {
    if (!r.error.empty()) {
      err << "failed: optimize method=" << method_name(r.method) << " seed=" << r.seed << " dim=" << r.dim + 1
          << ": " << r.error << "\n";
      failed = true;
    }
  }
  for (const EvalRecord& e : report.evals) {
    if (!e.error.empty()) {
      err << "failed: evaluate method=" << method_name(e.method) << " seed=" << e.seed
          << " split=" << split_name(e.split) << ": " << e.error << "\n";
      failed = true;
    }
  }
  return failed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel hyperparameter learning for chaotic systems: gradient descent vs kernel sum-of-squares", "ksos"};
  app.require_subcommand(1);

  // simulate
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate a system and write its trajectory as CSV");
  std::string sim_system;
  std::string sim_x0;
  int sim_steps = -1;
  double sim_dt = 0.0;
  std::string sim_out;
  simulate->add_option("--system", sim_system, "logistic, henon or lorenz")->required();
  simulate->add_option("--x0", sim_x0, "Initial state, comma separated (default: the training start)");
  simulate->add_option("--steps", sim_steps, "Number of steps (default: the system's trajectory length)");
  simulate->add_option("--dt", sim_dt, "Euler step for lorenz (default 0.01)");
  simulate->add_option("--out", sim_out, "Output CSV (default: stdout)");

  // optimize
  CLI::App* optimize = app.add_subcommand("optimize", "Run one optimizer on the training data and print theta and rho");
  ConfigFlags opt_cfg;
  opt_cfg.add_to(*optimize);
  std::string opt_method = "ksos";
  std::uint64_t opt_seed = 0;
  int opt_dim = 0;
  std::vector<double> opt_sweep;
  optimize->add_option("--method", opt_method, "ksos or gd")->check(CLI::IsMember({"ksos", "gd"}));
  optimize->add_option("--seed", opt_seed, "Seed for the rho split and the KSOS samples (default 0)");
  optimize->add_option("--dim", opt_dim, "Output dimension, 1-based (default: all)");
  optimize->add_option("--sweep", opt_sweep, "Learning-rate grid for gd; the lowest final rho wins")
      ->delimiter(',')
      ->expected(1, -1);

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "Fit interpolants at given parameters and report metrics");
  ConfigFlags eval_cfg;
  eval_cfg.add_to(*evaluate);
  std::string eval_params;
  std::string eval_method = "ksos";
  std::uint64_t eval_seed = 0;
  evaluate->add_option("--params", eval_params, "CSV with columns theta_1..theta_10 (e.g. raw_runs.csv)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--method", eval_method, "Row filter when the CSV has a method column (default ksos)");
  evaluate->add_option("--seed", eval_seed, "Row filter when the CSV has a seed column (default 0)");

  // experiment
  CLI::App* experiment = app.add_subcommand("experiment", "Run the multi-seed comparison and write tables and plots");
  ConfigFlags exp_cfg;
  exp_cfg.add_to(*experiment);
  std::vector<std::uint64_t> exp_seeds;
  int exp_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string exp_out;
  experiment->add_option("--seed", exp_seeds, "Run only these seeds (repeatable)");
  experiment->add_option("--jobs", exp_jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
  experiment->add_option("--out", exp_out, "Output directory (default: $KSOS_OUT_DIR or ./results)");

  // report
  CLI::App* report = app.add_subcommand("report", "Re-render tables and plots from records.json");
  std::string rep_records;
  std::string rep_out;
  report->add_option("--records", rep_records, "records.json written by experiment")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", rep_out, "Output directory (default: $KSOS_OUT_DIR or ./results)");

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (const auto subs = app.get_subcommands(); !subs.empty()) {
      err << subs.front()->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      SystemSpec spec;
      try {
        spec = default_system(parse_system_kind(sim_system));
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      if (simulate->count("--dt")) spec.dt = sim_dt;
      const Vector x0 = sim_x0.empty() ? spec.train_x0 : parse_vector(sim_x0, "--x0");
      const int steps = sim_steps >= 0 ? sim_steps : spec.n_steps;
      const Trajectory traj = generate_trajectory(spec, x0, steps);
      if (sim_out.empty()) {
        write_trajectory_csv(out, traj);
      } else {
        std::ofstream file(sim_out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write '" + sim_out + "'");
        write_trajectory_csv(file, traj);
        out << sim_out << "\n";
      }
      return kExitOk;
    }

    if (optimize->parsed()) {
      const ExperimentConfig cfg = opt_cfg.load();
      const int dims = cfg.system.dim;
      if (opt_dim < 0 || opt_dim > dims) {
        throw UsageError("--dim must be between 1 and " + std::to_string(dims));
      }
      const Dataset train = to_dataset(generate_trajectory(cfg.system, cfg.system.train_x0, cfg.system.n_steps));
      const Method method = parse_method(opt_method);
      for (int d = opt_dim > 0 ? opt_dim - 1 : 0; d < (opt_dim > 0 ? opt_dim : dims); ++d) {
        const std::string cell = "method=" + opt_method + " seed=" + std::to_string(opt_seed) +
                                 " dim=" + std::to_string(d + 1);
        try {
          const RhoObjective objective = make_split(train, d, opt_seed);
          OptTrace trace;
          std::optional<double> lower_bound;
          std::optional<double> learning_rate;
          if (method == Method::kGd) {
            if (opt_sweep.empty()) {
              trace = gd_minimize(objective, cfg.gd);
            } else {
              LrSweepResult best = lr_sweep(objective, opt_sweep, cfg.gd);
              trace = std::move(best.trace);
              learning_rate = best.learning_rate;
            }
          } else {
            SosConfig sos = cfg.sos;
            sos.seed = opt_seed;
            KsosRun run = ksos_minimize(objective, cfg.domain(), sos);
            trace = std::move(run.trace);
            lower_bound = run.lower_bound;
          }
          out << cell << " rho=" << format_double(trace.candidate_value) << " evals=" << trace.evals_used;
          if (lower_bound) out << " lower_bound=" << format_double(*lower_bound);
          if (learning_rate) out << " learning_rate=" << format_double(*learning_rate);
          out << "\n  theta=" << format_params(trace.candidate) << "\n";
        } catch (const std::exception& e) {
          err << "failed: optimize " << cell << ": " << e.what() << "\n";
          return kExitDomain;
        }
      }
      return kExitOk;
    }

    if (evaluate->parsed()) {
      const ExperimentConfig cfg = eval_cfg.load();
      const SystemSpec& sys = cfg.system;
      const std::vector<KernelParams> thetas = read_params_csv(eval_params, sys.dim, eval_method, eval_seed);
      const Trajectory train_truth = generate_trajectory(sys, sys.train_x0, sys.n_steps);
      const Trajectory test_truth = generate_trajectory(sys, sys.test_x0, sys.n_steps);
      try {
        const auto models = fit_all(thetas, to_dataset(train_truth));
        for (const auto& [name, truth] : {std::pair{"train", &train_truth}, std::pair{"test", &test_truth}}) {
          TrajectoryMetrics m;
          m.mean_error = mean_error(models, *truth);
          const Trajectory pred =
              predict_trajectory(models, truth->states.row(0).transpose(), static_cast<int>(truth->length() - 1));
          m.hausdorff = hausdorff(pred, *truth);
          for (double g : cfg.gammas) m.deviation[g] = deviation(pred, *truth, g);
          print_metrics(out, name, m);
        }
      } catch (const std::exception& e) {
        err << "failed: evaluate system=" << system_name(sys.kind) << ": " << e.what() << "\n";
        return kExitDomain;
      }
      return kExitOk;
    }

    if (experiment->parsed()) {
      ExperimentConfig cfg = exp_cfg.load();
      if (!exp_seeds.empty()) {
        cfg.seeds = exp_seeds;
        try {
          cfg.validate();
        } catch (const DomainError& e) {
          throw UsageError(e.what());
        }
      }
      const ExperimentReport result = run_experiment(cfg, exp_jobs);
      print_manifest(out, emit_report(result, exp_out.empty() ? default_out_dir() : fs::path(exp_out)));
      return report_failures(result, err) ? kExitDomain : kExitOk;
    }

    if (report->parsed()) {
      const ExperimentReport records = load_report(rep_records);
      print_manifest(out, emit_report(records, rep_out.empty() ? default_out_dir() : fs::path(rep_out)));
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace ksos
