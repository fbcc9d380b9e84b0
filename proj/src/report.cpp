#include "ksos/report.hpp"

#include "ksos/csv.hpp"
#include "ksos/svg.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ksos {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kMissing = "—";

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

std::string seed_tag(const ExperimentReport& report) {
  return report.config.seeds.empty() ? "seed0" : "seed" + std::to_string(report.config.seeds.front());
}

std::string mantissa(double v, int k) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v / std::pow(10.0, k));
  return buf;
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows, const char* label_column) {
  std::ofstream out = open_out(path);
  CsvWriter csv(out);
  csv.row({"method", label_column, "median", "p25", "p75", "n"});
  for (const SummaryRow& r : rows) {
    csv.row({std::string(method_name(r.method)), r.label, format_optional(r.stats.median),
             format_optional(r.stats.p25), format_optional(r.stats.p75), std::to_string(r.values.size())});
  }
  finish(out, path);
}

void write_text_table(std::ostream& out, const std::string& title, const std::string& label_column,
                      const std::vector<SummaryRow>& rows) {
  out << title << "\n";
  std::size_t label_width = label_column.size();
  for (const SummaryRow& r : rows) label_width = std::max(label_width, r.label.size());
  out << std::left << std::setw(8) << "method" << std::setw(static_cast<int>(label_width) + 2) << label_column
      << "median [p25, p75]\n";
  for (const SummaryRow& r : rows) {
    out << std::left << std::setw(8) << method_name(r.method) << std::setw(static_cast<int>(label_width) + 2)
        << r.label << format_summary_cell(r.stats) << "\n";
  }
  out << "\n";
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

void write_raw_runs(const fs::path& path, const ExperimentReport& report) {
  std::ofstream out = open_out(path);
  CsvWriter csv(out);
  std::vector<std::string> header{"method", "seed", "dim", "rho", "initial_rho", "lower_bound", "evals_used",
                                  "diagnostic_evals"};
  for (int k = 1; k <= kNumParams; ++k) header.push_back("theta_" + std::to_string(k));
  header.push_back("error");
  csv.row(header);
  for (const OptRecord& r : report.runs) {
    std::vector<std::string> row{std::string(method_name(r.method)), std::to_string(r.seed),
                                 std::to_string(r.dim + 1), format_optional(r.rho),
                                 r.trace.values.empty() ? "" : format_double(r.trace.values.front()),
                                 format_optional(r.lower_bound), std::to_string(r.trace.evals_used),
                                 std::to_string(r.trace.diagnostic_evals)};
    for (int k = 0; k < kNumParams; ++k) {
      row.push_back(r.ok() ? format_double(r.trace.candidate[k]) : "");
    }
    row.push_back(r.error);
    csv.row(row);
  }
  finish(out, path);
}

void write_raw_metrics(const fs::path& path, const ExperimentReport& report) {
  std::ofstream out = open_out(path);
  CsvWriter csv(out);
  csv.row({"method", "seed", "split", "metric", "value", "error"});
  const auto labels = metric_labels(report.config);
  for (const EvalRecord& e : report.evals) {
    const std::string m(method_name(e.method)), seed = std::to_string(e.seed), split(split_name(e.split));
    csv.row({m, seed, split, labels[0], format_optional(e.metrics.mean_error), e.error});
    csv.row({m, seed, split, labels[1], format_optional(e.metrics.hausdorff), e.error});
    for (std::size_t g = 0; g < report.config.gammas.size(); ++g) {
      const auto it = e.metrics.deviation.find(report.config.gammas[g]);
      csv.row({m, seed, split, labels[g + 2], it == e.metrics.deviation.end() ? "" : optional_int(it->second),
               e.error});
    }
  }
  finish(out, path);
}

void write_chart(const fs::path& path, const std::vector<ChartSeries>& series, const ChartOptions& options) {
  std::ofstream out = open_out(path);
  write_line_chart(out, series, options);
  finish(out, path);
}

void write_loss_curves(const fs::path& csv_path, const fs::path& svg_path, const ExperimentReport& report) {
  std::ofstream out = open_out(csv_path);
  CsvWriter csv(out);
  csv.row({"method", "dim", "iteration", "rho"});
  std::vector<ChartSeries> series;
  if (!report.config.seeds.empty()) {
    const std::uint64_t seed = report.config.seeds.front();
    for (Method m : kMethods) {
      for (int d = 0; d < report.config.system.dim; ++d) {
        const OptRecord* r = report.find_run(m, seed, d);
        if (r == nullptr) continue;
        ChartSeries s{std::string(method_name(m)) + " dim " + std::to_string(d + 1), {}, {}};
        for (std::size_t t = 0; t < r->trace.values.size(); ++t) {
          csv.row({std::string(method_name(m)), std::to_string(d + 1), std::to_string(t),
                   format_double(r->trace.values[t])});
          s.x.push_back(static_cast<double>(t));
          s.y.push_back(r->trace.values[t]);
        }
        series.push_back(std::move(s));
      }
    }
  }
  finish(out, csv_path);
  write_chart(svg_path, series, {"Relative rho per iteration (" + seed_tag(report) + ")", "iteration", "rho", true});
}

void write_distances(const fs::path& csv_path, const fs::path& svg_path, const ExperimentReport& report) {
  std::ofstream out = open_out(csv_path);
  CsvWriter csv(out);
  csv.row({"split", "method", "step", "distance"});
  std::vector<ChartSeries> series;
  if (!report.config.seeds.empty()) {
    const std::uint64_t seed = report.config.seeds.front();
    for (Split split : {Split::kTrain, Split::kTest}) {
      const Trajectory& truth = split == Split::kTrain ? report.train_truth : report.test_truth;
      for (Method m : kMethods) {
        const EvalRecord* e = report.find_eval(m, seed, split);
        if (e == nullptr || e->prediction.length() == 0) continue;
        ChartSeries s{std::string(method_name(m)) + " " + std::string(split_name(split)), {}, {}};
        const std::vector<double> dist = stepwise_distance(e->prediction, truth);
        for (std::size_t t = 0; t < dist.size(); ++t) {
          csv.row({std::string(split_name(split)), std::string(method_name(m)), std::to_string(t),
                   format_double(dist[t])});
          s.x.push_back(static_cast<double>(t));
          s.y.push_back(dist[t]);
        }
        series.push_back(std::move(s));
      }
    }
  }
  finish(out, csv_path);
  write_chart(svg_path, series,
              {"Distance to the true trajectory (" + seed_tag(report) + ")", "step", "distance", true});
}

void write_trajectories(const fs::path& csv_path, const fs::path& svg_path, const ExperimentReport& report) {
  std::ofstream out = open_out(csv_path);
  CsvWriter csv(out);
  const int dim = report.config.system.dim;
  std::vector<std::string> header{"split", "source", "step"};
  for (const std::string& n : state_column_names(dim)) header.push_back(n);
  csv.row(header);

  std::vector<ChartSeries> series;
  auto emit = [&](Split split, const std::string& source, const Trajectory& t) {
    ChartSeries s{source + " " + std::string(split_name(split)), {}, {}};
    for (Eigen::Index step = 0; step < t.length(); ++step) {
      std::vector<std::string> row{std::string(split_name(split)), source, std::to_string(step)};
      for (Eigen::Index k = 0; k < t.dim(); ++k) row.push_back(format_double(t.states(step, k)));
      csv.row(row);
      if (split == Split::kTest) {
        s.x.push_back(static_cast<double>(step));
        s.y.push_back(t.states(step, 0));
      }
    }
    if (split == Split::kTest) series.push_back(std::move(s));
  };
  if (!report.config.seeds.empty()) {
    const std::uint64_t seed = report.config.seeds.front();
    for (Split split : {Split::kTrain, Split::kTest}) {
      const Trajectory& truth = split == Split::kTrain ? report.train_truth : report.test_truth;
      if (truth.length() > 0) emit(split, "true", truth);
      for (Method m : kMethods) {
        const EvalRecord* e = report.find_eval(m, seed, split);
        if (e != nullptr && e->prediction.length() > 0) emit(split, std::string(method_name(m)), e->prediction);
      }
    }
  }
  finish(out, csv_path);
  write_chart(svg_path, series,
              {"Test trajectory, first coordinate (" + seed_tag(report) + ")", "step", state_column_names(dim)[0], false});
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json params_json(const KernelParams& p) {
  return json(std::vector<double>(p.values().data(), p.values().data() + kNumParams));
}

KernelParams params_from(const json& v) {
  const auto values = v.get<std::vector<double>>();
  if (values.size() != static_cast<std::size_t>(kNumParams)) {
    throw ConfigError("records: parameter vector has the wrong length");
  }
  return KernelParams(ParamVector(Eigen::Map<const ParamVector>(values.data())));
}

json states_json(const Trajectory& t) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < t.length(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(t.dim()));
    for (Eigen::Index k = 0; k < t.dim(); ++k) row[static_cast<std::size_t>(k)] = t.states(i, k);
    rows.push_back(row);
  }
  return rows;
}

Trajectory trajectory_from(const json& rows, int dim, TrajectoryOrigin origin) {
  Trajectory t;
  t.origin = origin;
  t.states.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (row.size() != static_cast<std::size_t>(dim)) {
      throw ConfigError("records: trajectory row has the wrong dimension");
    }
    for (int k = 0; k < dim; ++k) t.states(static_cast<Eigen::Index>(i), k) = row[static_cast<std::size_t>(k)];
  }
  return t;
}

}  // namespace

std::string format_summary_cell(const SummaryStats& stats) {
  if (!stats.median) return kMissing;
  const double med = *stats.median;
  int k = 0;
  if (med != 0.0 && std::isfinite(med) && (std::abs(med) < 1.0 || std::abs(med) >= 100.0)) {
    k = static_cast<int>(std::floor(std::log10(std::abs(med))));
  }
  auto part = [&](const std::optional<double>& v) { return v ? mantissa(*v, k) : std::string(kMissing); };
  std::string cell = mantissa(med, k) + " [" + part(stats.p25) + ", " + part(stats.p75) + "]";
  if (k != 0) cell += " x 10^" + std::to_string(k);
  return cell;
}

std::vector<fs::path> emit_report(const ExperimentReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());
  }
  std::vector<fs::path> manifest;
  auto path = [&](const std::string& name) {
    manifest.push_back(out_dir / name);
    return manifest.back();
  };

  const std::vector<SummaryRow> rho_rows = rho_summary(report);
  const std::vector<SummaryRow> train_rows = metric_summary(report, Split::kTrain);
  const std::vector<SummaryRow> test_rows = metric_summary(report, Split::kTest);
  write_summary_csv(path("rho_summary.csv"), rho_rows, "dim");
  write_summary_csv(path("train_metrics.csv"), train_rows, "metric");
  write_summary_csv(path("test_metrics.csv"), test_rows, "metric");

  {
    const fs::path p = path("summary.txt");
    std::ofstream out = open_out(p);
    out << "system " << system_name(report.config.system.kind) << ", " << report.config.seeds.size()
        << " seeds, budget " << report.config.budget << "\n\n";
    write_text_table(out, "Relative rho", "dim", rho_rows);
    write_text_table(out, "Train trajectory", "metric", train_rows);
    write_text_table(out, "Test trajectory", "metric", test_rows);
    finish(out, p);
  }

  write_raw_runs(path("raw_runs.csv"), report);
  write_raw_metrics(path("raw_metrics.csv"), report);
  const std::string tag = seed_tag(report);
  {
    const fs::path c = path("loss_curve_" + tag + ".csv");
    write_loss_curves(c, path("loss_curve_" + tag + ".svg"), report);
  }
  {
    const fs::path c = path("distance_" + tag + ".csv");
    write_distances(c, path("distance_" + tag + ".svg"), report);
  }
  {
    const fs::path c = path("trajectories_" + tag + ".csv");
    write_trajectories(c, path("trajectories_" + tag + ".svg"), report);
  }
  {
    const fs::path p = path("records.json");
    std::ofstream out = open_out(p);
    out << report_to_json(report);
    finish(out, p);
  }
  return manifest;
}

std::string report_to_json(const ExperimentReport& report) {
  json doc;
  doc["config"] = json::parse(config_to_json(report.config));
  doc["train_truth"] = states_json(report.train_truth);
  doc["test_truth"] = states_json(report.test_truth);
  json runs = json::array();
  for (const OptRecord& r : report.runs) {
    json iterates = json::array();
    for (const KernelParams& p : r.trace.iterates) iterates.push_back(params_json(p));
    runs.push_back({{"method", std::string(method_name(r.method))},
                    {"seed", r.seed},
                    {"dim", r.dim},
                    {"half_indices", r.half_indices},
                    {"iterates", iterates},
                    {"values", r.trace.values},
                    {"candidate", params_json(r.trace.candidate)},
                    {"candidate_value", r.trace.candidate_value},
                    {"evals_used", r.trace.evals_used},
                    {"diagnostic_evals", r.trace.diagnostic_evals},
                    {"rho", optional_json(r.rho)},
                    {"lower_bound", optional_json(r.lower_bound)},
                    {"error", r.error}});
  }
  doc["runs"] = runs;
  json evals = json::array();
  for (const EvalRecord& e : report.evals) {
    json dev = json::array();
    for (const auto& [gamma, v] : e.metrics.deviation) {
      dev.push_back({gamma, v ? json(*v) : json(nullptr)});
    }
    evals.push_back({{"method", std::string(method_name(e.method))},
                     {"seed", e.seed},
                     {"split", std::string(split_name(e.split))},
                     {"mean_error", optional_json(e.metrics.mean_error)},
                     {"hausdorff", optional_json(e.metrics.hausdorff)},
                     {"deviation", dev},
                     {"prediction", states_json(e.prediction)},
                     {"diverged", e.prediction.diverged},
                     {"error", e.error}});
  }
  doc["evals"] = evals;
  return doc.dump(1) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("records are not a JSON object");
  }
  try {
    ExperimentReport report;
    report.config = parse_config(doc.at("config").dump());
    const int dim = report.config.system.dim;
    report.train_truth = trajectory_from(doc.at("train_truth"), dim, TrajectoryOrigin::kTrueSystem);
    report.test_truth = trajectory_from(doc.at("test_truth"), dim, TrajectoryOrigin::kTrueSystem);
    for (const json& j : doc.at("runs")) {
      OptRecord r;
      r.method = parse_method(j.at("method").get<std::string>());
      r.seed = j.at("seed").get<std::uint64_t>();
      r.dim = j.at("dim").get<int>();
      r.half_indices = j.at("half_indices").get<std::vector<std::size_t>>();
      for (const json& p : j.at("iterates")) r.trace.iterates.push_back(params_from(p));
      r.trace.values = j.at("values").get<std::vector<double>>();
      r.trace.candidate = params_from(j.at("candidate"));
      r.trace.candidate_value = j.at("candidate_value").get<double>();
      r.trace.evals_used = j.at("evals_used").get<std::int64_t>();
      r.trace.diagnostic_evals = j.at("diagnostic_evals").get<std::int64_t>();
      r.rho = optional_from(j.at("rho"));
      r.lower_bound = optional_from(j.at("lower_bound"));
      r.error = j.at("error").get<std::string>();
      report.runs.push_back(std::move(r));
    }
    for (const json& j : doc.at("evals")) {
      EvalRecord e;
      e.method = parse_method(j.at("method").get<std::string>());
      e.seed = j.at("seed").get<std::uint64_t>();
      const std::string split = j.at("split").get<std::string>();
      if (split != "train" && split != "test") throw ConfigError("records: unknown split '" + split + "'");
      e.split = split == "train" ? Split::kTrain : Split::kTest;
      e.metrics.mean_error = optional_from(j.at("mean_error"));
      e.metrics.hausdorff = optional_from(j.at("hausdorff"));
      for (const json& d : j.at("deviation")) {
        e.metrics.deviation[d.at(0).get<double>()] =
            d.at(1).is_null() ? std::nullopt : std::optional<int>(d.at(1).get<int>());
      }
      e.prediction = trajectory_from(j.at("prediction"), dim, TrajectoryOrigin::kInterpolant);
      e.prediction.diverged = j.at("diverged").get<bool>();
      e.error = j.at("error").get<std::string>();
      report.evals.push_back(std::move(e));
    }
    return report;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed records: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid records: ") + e.what());
  }
}

ExperimentReport load_report(const fs::path& records_json) {
  std::ifstream in(records_json, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read records '" + records_json.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return report_from_json(text.str());
}

}  // namespace ksos
