#include "ksos/harness.hpp"

#include "ksos/csv.hpp"
#include "ksos/rho.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <map>
#include <thread>
#include <tuple>

namespace ksos {

namespace {

void run_parallel(const std::vector<std::function<void()>>& tasks, int jobs) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      tasks[i]();
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), tasks.size());
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::vector<RhoObjective> seed_objectives(const Dataset& data, std::uint64_t seed) {
  std::vector<RhoObjective> out;
  for (Eigen::Index d = 0; d < data.output_dim(); ++d) {
    out.push_back(make_split(data, d, seed));
  }
  return out;
}

void run_gd(OptRecord& rec, const RhoObjective& objective, const GdConfig& cfg) {
  rec.half_indices = objective.half_indices();
  try {
    rec.trace = gd_minimize(objective, cfg);
    rec.rho = rec.trace.candidate_value;
  } catch (const OptimizationError& e) {
    rec.trace = e.partial_trace();
    rec.error = e.what();
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
}

void run_ksos(std::vector<OptRecord*> recs, const std::vector<RhoObjective>& objectives, const ParamDomain& domain,
              const SosConfig& cfg) {
  std::vector<const RhoObjective*> rho_ptrs;
  std::vector<const ParamObjective*> ptrs;
  for (const auto& o : objectives) {
    rho_ptrs.push_back(&o);
    ptrs.push_back(&o);
  }
  for (std::size_t d = 0; d < recs.size(); ++d) recs[d]->half_indices = objectives[d].half_indices();
  try {
    const std::vector<KsosRun> runs = ksos_minimize_shared(
        ptrs, [&](const KernelParams& theta) { return rho_all_outputs(rho_ptrs, theta); }, domain, cfg);
    for (std::size_t d = 0; d < recs.size(); ++d) {
      recs[d]->trace = runs[d].trace;
      recs[d]->rho = runs[d].trace.candidate_value;
      recs[d]->lower_bound = runs[d].lower_bound;
    }
  } catch (const std::exception& e) {
    for (OptRecord* r : recs) r->error = e.what();
  }
}

TrajectoryMetrics rollout_metrics(const std::vector<FittedInterpolant>& models, const Trajectory& truth,
                                  const std::vector<double>& gammas, Trajectory& prediction) {
  TrajectoryMetrics m;
  m.mean_error = mean_error(models, truth);
  const Vector x0 = truth.states.row(0).transpose();
  prediction = predict_trajectory(models, x0, static_cast<int>(truth.length() - 1));
  m.hausdorff = hausdorff(prediction, truth);
  for (double g : gammas) {
    m.deviation[g] = deviation(prediction, truth, g);
  }
  return m;
}

void evaluate_candidate(std::array<EvalRecord*, 2> evals, const std::vector<const OptRecord*>& runs,
                        const Dataset& train, const Trajectory& train_truth, const Trajectory& test_truth,
                        const std::vector<double>& gammas) {
  for (const OptRecord* r : runs) {
    if (!r->ok()) {
      for (EvalRecord* e : evals) e->error = "optimization failed on dimension " + std::to_string(r->dim + 1);
      return;
    }
  }
  std::vector<FittedInterpolant> models;
  try {
    for (const OptRecord* r : runs) {
      models.push_back(fit(r->trace.candidate, Dataset{train.X, train.Y.col(r->dim)}));
    }
  } catch (const std::exception& e) {
    for (EvalRecord* ev : evals) ev->error = e.what();
    return;
  }
  const Trajectory* truths[] = {&train_truth, &test_truth};
  for (std::size_t s = 0; s < 2; ++s) {
    try {
      evals[s]->metrics = rollout_metrics(models, *truths[s], gammas, evals[s]->prediction);
    } catch (const std::exception& e) {
      evals[s]->error = e.what();
    }
  }
}

std::optional<double> as_optional(const std::optional<int>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

}  // namespace

std::string_view method_name(Method m) { return m == Method::kGd ? "gd" : "ksos"; }

Method parse_method(std::string_view name) {
  if (name == "gd") return Method::kGd;
  if (name == "ksos") return Method::kKsos;
  throw DomainError("unknown method '" + std::string(name) + "' (expected gd or ksos)");
}

std::string_view split_name(Split s) { return s == Split::kTrain ? "train" : "test"; }

const OptRecord* ExperimentReport::find_run(Method m, std::uint64_t seed, int dim) const {
  for (const auto& r : runs) {
    if (r.method == m && r.seed == seed && r.dim == dim) return &r;
  }
  return nullptr;
}

const EvalRecord* ExperimentReport::find_eval(Method m, std::uint64_t seed, Split split) const {
  for (const auto& e : evals) {
    if (e.method == m && e.seed == seed && e.split == split) return &e;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  const SystemSpec& sys = cfg.system;
  report.train_truth = generate_trajectory(sys, sys.train_x0, sys.n_steps);
  report.test_truth = generate_trajectory(sys, sys.test_x0, sys.n_steps);
  const Dataset train = to_dataset(report.train_truth);
  const int dims = sys.dim;

  // Preallocate every cell so workers only write to their own slots.
  for (Method m : kMethods) {
    for (std::uint64_t seed : cfg.seeds) {
      for (int d = 0; d < dims; ++d) {
        OptRecord r;
        r.method = m;
        r.seed = seed;
        r.dim = d;
        report.runs.push_back(std::move(r));
      }
      for (Split s : {Split::kTrain, Split::kTest}) {
        EvalRecord e;
        e.method = m;
        e.seed = seed;
        e.split = s;
        report.evals.push_back(std::move(e));
      }
    }
  }
  auto run_slot = [&](Method m, std::size_t seed_index, int d) {
    const std::size_t method_index = m == kMethods[0] ? 0 : 1;
    return &report.runs[(method_index * cfg.seeds.size() + seed_index) * dims + d];
  };
  auto eval_slot = [&](Method m, std::size_t seed_index, Split s) {
    const std::size_t method_index = m == kMethods[0] ? 0 : 1;
    return &report.evals[(method_index * cfg.seeds.size() + seed_index) * 2 + (s == Split::kTrain ? 0 : 1)];
  };

  std::vector<std::function<void()>> optimize;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    const std::uint64_t seed = cfg.seeds[si];
    optimize.emplace_back([&, si, seed] {
      std::vector<OptRecord*> recs;
      for (int d = 0; d < dims; ++d) recs.push_back(run_slot(Method::kKsos, si, d));
      SosConfig sos = cfg.sos;
      sos.seed = seed;
      try {
        run_ksos(recs, seed_objectives(train, seed), cfg.domain(), sos);
      } catch (const std::exception& e) {
        for (OptRecord* r : recs) r->error = e.what();
      }
    });
    for (int d = 0; d < dims; ++d) {
      optimize.emplace_back([&, si, seed, d] {
        OptRecord* rec = run_slot(Method::kGd, si, d);
        try {
          run_gd(*rec, make_split(train, d, seed), cfg.gd);
        } catch (const std::exception& e) {
          rec->error = e.what();
        }
      });
    }
  }
  run_parallel(optimize, jobs);

  std::vector<std::function<void()>> evaluate;
  for (Method m : kMethods) {
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      evaluate.emplace_back([&, m, si] {
        std::vector<const OptRecord*> runs;
        for (int d = 0; d < dims; ++d) runs.push_back(run_slot(m, si, d));
        evaluate_candidate({eval_slot(m, si, Split::kTrain), eval_slot(m, si, Split::kTest)}, runs, train,
                           report.train_truth, report.test_truth, cfg.gammas);
      });
    }
  }
  run_parallel(evaluate, jobs);
  return report;
}

std::vector<SummaryRow> rho_summary(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  const int dims = cfg.system.dim;
  std::vector<SummaryRow> rows;
  for (Method m : kMethods) {
    if (dims > 1) {
      SummaryRow mean{m, "mean", {}, {}};
      for (std::uint64_t seed : cfg.seeds) {
        std::optional<double> total = 0.0;
        for (int d = 0; d < dims; ++d) {
          const OptRecord* r = report.find_run(m, seed, d);
          if (r == nullptr || !r->rho) {
            total.reset();
            break;
          }
          *total += *r->rho;
        }
        if (total) *total /= dims;
        mean.values.push_back(total);
      }
      rows.push_back(std::move(mean));
    }
    for (int d = 0; d < dims; ++d) {
      SummaryRow row{m, std::to_string(d + 1), {}, {}};
      for (std::uint64_t seed : cfg.seeds) {
        const OptRecord* r = report.find_run(m, seed, d);
        row.values.push_back(r != nullptr ? r->rho : std::nullopt);
      }
      rows.push_back(std::move(row));
    }
  }
  for (SummaryRow& row : rows) {
    if (!row.values.empty()) row.stats = summary_stats(row.values);
  }
  return rows;
}

std::vector<std::string> metric_labels(const ExperimentConfig& cfg) {
  std::vector<std::string> labels{"mean_error", "hausdorff"};
  for (double g : cfg.gammas) labels.push_back("deviation_" + format_double(g));
  return labels;
}

std::vector<SummaryRow> metric_summary(const ExperimentReport& report, Split split) {
  const ExperimentConfig& cfg = report.config;
  const std::vector<std::string> labels = metric_labels(cfg);
  std::vector<SummaryRow> rows;
  for (Method m : kMethods) {
    for (std::size_t k = 0; k < labels.size(); ++k) {
      SummaryRow row{m, labels[k], {}, {}};
      for (std::uint64_t seed : cfg.seeds) {
        const EvalRecord* e = report.find_eval(m, seed, split);
        std::optional<double> v;
        if ((e == nullptr || !e->error.empty()) && k >= 2) {
          // A failed evaluation is the worst deviation outcome: immediate.
          v = 0.0;
        } else if (e != nullptr && e->error.empty()) {
          if (k == 0) {
            v = e->metrics.mean_error;
          } else if (k == 1) {
            v = e->metrics.hausdorff;
          } else {
            const auto it = e->metrics.deviation.find(cfg.gammas[k - 2]);
            if (it != e->metrics.deviation.end()) v = as_optional(it->second);
          }
        }
        row.values.push_back(v);
      }
      if (!row.values.empty()) row.stats = summary_stats(row.values);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ksos
