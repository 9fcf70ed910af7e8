#include "evbma/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evbma/analysis.hpp"
#include "evbma/csv.hpp"
#include "evbma/version.hpp"

namespace evbma {

namespace {

namespace fs = std::filesystem;

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra,
                    const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["version"] = std::string(kVersion);
  m["command"] = command;
  for (const auto& [k, v] : extra) m[k] = v;
  m["base_seed"] = cfg.base_seed;
  m["replications"] = cfg.replications;
  m["parallelism"] = cfg.parallelism;
  m["config"] = nlohmann::ordered_json::parse(serialize_config(cfg));
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << m.dump(2) << "\n";
}

void write_results_csv(const fs::path& path, const ExpandedPoint& p,
                       std::span<const ReplicationResult> results) {
  CsvWriter w(path.string());
  w.field("rep").field("d").field("x").field("N").field("standard_estimate")
      .field("bma_estimate").field("truth");
  for (const auto& s : p.design.sources) w.field("alpha_" + s.name);
  w.end_row();
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      w.field(static_cast<std::int64_t>(r.rep_index))
          .field(c.cell.treatment)
          .field(c.cell.covariate)
          .field(c.count)
          .field(c.standard_estimate)
          .field(c.bma_estimate)
          .field(c.truth);
      for (double a : c.weights) w.field(a);
      w.end_row();
    }
  }
}

void append_summary_rows(CsvWriter& summary, CsvWriter& alpha, const ExpandedPoint& p,
                         const DesignSummary& ds) {
  const auto point_fields = [&](CsvWriter& w, const CellKey& cell) -> CsvWriter& {
    return w.field(p.design_id)
        .field(model_name(p.model))
        .field(p.e)
        .field(static_cast<std::int64_t>(p.T))
        .field(cell.treatment)
        .field(cell.covariate);
  };
  for (const auto& cs : ds.cells) {
    const auto estimator_row = [&](const char* name, const EstimatorSummary& es,
                                   const std::optional<double>& accel) {
      point_fields(summary, cs.cell)
          .field(name)
          .field(es.replications)
          .field(es.mean)
          .field(es.q1)
          .field(es.median)
          .field(es.q3)
          .field(es.min)
          .field(es.max)
          .field(accel);
      summary.end_row();
    };
    estimator_row("bma", cs.bma_scaled_error, cs.mean_acceleration);
    if (cs.standard_scaled_error)
      estimator_row("standard", *cs.standard_scaled_error, std::nullopt);

    for (std::size_t s = 0; s < p.design.sources.size(); ++s) {
      const auto& src = p.design.sources[s];
      const auto& prior = src.prior(p.design.environment, cs.cell.treatment, cs.cell.covariate);
      point_fields(alpha, cs.cell)
          .field(src.name)
          .field(source_role(prior, cs.truth))
          .field(cs.mean_weights[s]);
      alpha.end_row();
    }
  }
}

struct BoxStats {
  double mean, q1, median, q3, whisker_low, whisker_high, min, max;
};

BoxStats box_from_sorted(const std::vector<double>& s) {
  BoxStats b{};
  double total = 0.0;
  for (double v : s) total += v;
  b.mean = total / static_cast<double>(s.size());
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = *std::lower_bound(s.begin(), s.end(), lo_fence);
  auto hi = std::upper_bound(s.begin(), s.end(), hi_fence);
  b.whisker_high = hi == s.begin() ? s.front() : *(hi - 1);
  b.min = s.front();
  b.max = s.back();
  return b;
}

RunConfig reproduction_config() {
  RunConfig cfg;
  const std::pair<const char*, ModelId> models[] = {
      {"m1", ModelId::Model1}, {"m2", ModelId::Model2}, {"m3", ModelId::Model3}};
  for (const auto& [id, model] : models) {
    DesignEntry d;
    d.id = id;
    d.model = model;
    d.e_grid.assign(kBenchmarkEvidenceScales.begin(), kBenchmarkEvidenceScales.end());
    d.t_grid.assign(kBenchmarkHorizons.begin(), kBenchmarkHorizons.end());
    cfg.designs.push_back(std::move(d));
  }
  return cfg;
}

std::string rate_axis_name(RateAxis axis) {
  return axis == RateAxis::LogN ? "log_n" : "log_ell";
}

// One diagnostics.csv row; absent fields stay empty so every kind shares the
// same header.
struct DiagRow {
  std::string kind, design, model, estimator, source, axis, growth_ok;
  std::optional<double> e, slope, intercept, r_squared, partial_sum, quarter_sum, epsilon,
      acceleration;
  std::optional<std::int64_t> points, horizon, pac_n;
};

void write_diag_header(CsvWriter& w) {
  w.field("kind").field("design").field("model").field("e").field("estimator")
      .field("source").field("axis").field("slope").field("intercept")
      .field("r_squared").field("points").field("horizon").field("partial_sum")
      .field("quarter_sum").field("growth_ok").field("epsilon").field("acceleration")
      .field("pac_n");
  w.end_row();
}

void write_diag_row(CsvWriter& w, const DiagRow& r) {
  const auto opt_int = [&](const std::optional<std::int64_t>& v) {
    if (v) w.field(*v);
    else w.field("");
  };
  w.field(r.kind).field(r.design).field(r.model).field(r.e).field(r.estimator)
      .field(r.source).field(r.axis).field(r.slope).field(r.intercept).field(r.r_squared);
  opt_int(r.points);
  opt_int(r.horizon);
  w.field(r.partial_sum).field(r.quarter_sum).field(r.growth_ok).field(r.epsilon)
      .field(r.acceleration);
  opt_int(r.pac_n);
  w.end_row();
}

struct PointGroup {
  std::string design_id;
  std::optional<double> e;
  std::vector<const ExpandedPoint*> points;
};

std::vector<PointGroup> group_points(const std::vector<ExpandedPoint>& pts) {
  std::vector<PointGroup> groups;
  for (const auto& p : pts) {
    if (groups.empty() || groups.back().design_id != p.design_id || groups.back().e != p.e)
      groups.push_back({p.design_id, p.e, {}});
    groups.back().points.push_back(&p);
  }
  return groups;
}

double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

void diagnose_rates(const RunConfig& cfg, CsvWriter& w) {
  const auto points = expand_config(cfg);
  for (const auto& g : group_points(points)) {
    if (g.points.size() < 3)
      throw ConfigError("designs", "design '" + g.design_id +
                                       "': rate diagnostic needs at least three horizons");
    // The regressions run on the raw (unscaled) mean absolute error, so a
    // root-n estimator shows up as slope -1/2.
    std::map<std::int64_t, double> bma_err;
    std::map<std::int64_t, double> std_err;
    bool standard_complete = true;
    for (const ExpandedPoint* p : g.points) {
      const auto results = run_design(p->design, cfg.parallelism);
      std::vector<double> bma_abs, std_abs, counts;
      bma_abs.reserve(results.size());
      for (const auto& r : results) {
        const auto& c = r.cells.front();
        bma_abs.push_back(std::abs(c.bma_estimate - c.truth));
        counts.push_back(static_cast<double>(c.count));
        if (c.standard_estimate)
          std_abs.push_back(std::abs(*c.standard_estimate - c.truth));
        else
          standard_complete = false;
      }
      const auto n = static_cast<std::int64_t>(std::llround(sorted_mean(std::move(counts))));
      bma_err[n] = sorted_mean(std::move(bma_abs));
      if (standard_complete) std_err[n] = sorted_mean(std::move(std_abs));
    }
    const std::string model = model_name(g.points.front()->model);
    const auto emit = [&](const char* estimator, const std::map<std::int64_t, double>& errs) {
      const RateFit fit = rate_regression(errs, cfg.diagnostics.use_ell);
      DiagRow row;
      row.kind = "rates";
      row.design = g.design_id;
      row.model = model;
      row.e = g.e;
      row.estimator = estimator;
      row.axis = rate_axis_name(fit.axis);
      row.slope = fit.slope;
      row.intercept = fit.intercept;
      row.r_squared = fit.r_squared;
      row.points = fit.points;
      write_diag_row(w, row);
    };
    emit("bma", bma_err);
    if (standard_complete && std_err.size() >= 3) emit("standard", std_err);
  }
}

void diagnose_decay(const RunConfig& cfg, CsvWriter& w) {
  const auto points = expand_config(cfg);
  bool any = false;
  for (const auto& g : group_points(points)) {
    const ExpandedPoint& first = *g.points.front();
    const Environment& env = first.design.environment;
    const double truth = env.truth(0, 0);
    std::vector<DesignSummary> summaries;
    summaries.reserve(g.points.size());
    for (const ExpandedPoint* p : g.points)
      summaries.push_back(summarize_design(p->design, run_design(p->design, cfg.parallelism)));
    for (std::size_t s = 0; s < first.design.sources.size(); ++s) {
      const SourcePrior& prior = first.design.sources[s].prior(env, 0, 0);
      if (source_role(prior, truth) != "biased") continue;
      std::vector<double> alphas, nus;
      for (std::size_t k = 0; k < g.points.size(); ++k) {
        const auto& cell0 = summaries[k].cells.front();
        alphas.push_back(cell0.mean_weights[s]);
        CellStats stats;
        stats.count = std::llround(cell0.mean_count);
        nus.push_back(effective_precision(prior, stats, g.points[k]->T));
      }
      const RateFit fit = decay_slope_fit(alphas, nus, prior.prior_mean - truth);
      DiagRow row;
      row.kind = "decay";
      row.design = g.design_id;
      row.model = model_name(first.model);
      row.e = g.e;
      row.source = first.design.sources[s].name;
      row.axis = "nu_bias_sq";
      row.slope = fit.slope;
      row.intercept = fit.intercept;
      row.r_squared = fit.r_squared;
      row.points = fit.points;
      write_diag_row(w, row);
      any = true;
    }
  }
  if (!any)
    throw ConfigError("designs", "decay diagnostic needs at least one biased source");
}

void diagnose_divergence(const RunConfig& cfg, CsvWriter& w) {
  for (const auto& d : cfg.designs) {
    const int arms = d.model == ModelId::Custom ? d.environment->arms : 2;
    const PolicySpec policy = d.policy ? *d.policy : PolicySpec::alternating(arms);
    const DivergenceDiagnostic diag =
        check_exploration_divergence(policy, cfg.diagnostics.horizon, arms);
    DiagRow row;
    row.kind = "divergence";
    row.design = d.id;
    row.model = model_name(d.model);
    row.horizon = cfg.diagnostics.horizon;
    row.partial_sum = diag.partial_sum;
    row.quarter_sum = diag.quarter_sum;
    row.growth_ok = diag.growth_ok ? "true" : "false";
    write_diag_row(w, row);
  }
}

void diagnose_pac(const RunConfig& cfg, CsvWriter& w) {
  if (cfg.diagnostics.pac.empty())
    throw ConfigError("diagnostics.pac", "no pac requests configured");
  for (std::size_t i = 0; i < cfg.diagnostics.pac.size(); ++i) {
    const PacRequest& r = cfg.diagnostics.pac[i];
    DiagRow row;
    row.kind = "pac";
    row.epsilon = r.epsilon;
    double accel = 0.0;
    if (r.acceleration) {
      accel = *r.acceleration;
    } else {
      row.design = *r.design_id;
      const auto it = std::find_if(cfg.designs.begin(), cfg.designs.end(),
                                   [&](const DesignEntry& d) { return d.id == *r.design_id; });
      const DesignEntry& entry = *it;
      Environment env;
      std::vector<Source> sources;
      int t0 = entry.t_grid.front();
      if (entry.model == ModelId::Custom) {
        env = *entry.environment;
        sources = entry.sources;
      } else {
        const DesignPoint dp = build_benchmark_model(entry.model, entry.e_grid.front(), t0);
        env = dp.environment;
        sources = dp.sources;
      }
      double sum = 0.0;
      int n = 0;
      for (const auto& src : sources) {
        bool unbiased_everywhere = true;
        for (std::size_t c = 0; c < env.cells.size(); ++c) {
          if (source_role(src.cell_priors[c], env.cells[c].mean) != "unbiased") {
            unbiased_everywhere = false;
            break;
          }
        }
        if (!unbiased_everywhere) continue;
        sum += 1.0 / (1.0 + precision_limit(src.prior(env, 0, 0), t0).c);
        ++n;
      }
      if (n == 0)
        throw ConfigError("diagnostics.pac[" + std::to_string(i) + "].design",
                          "design '" + entry.id +
                              "' has no unbiased sources (the unbiased set is empty)");
      accel = sum / static_cast<double>(n);
    }
    row.acceleration = accel;
    row.pac_n = pac_sample_size(r.epsilon, accel);
    write_diag_row(w, row);
  }
}

}  // namespace

void apply_overrides(RunConfig& cfg, const CommandOptions& opt) {
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.parallelism) {
    if (*opt.parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
    cfg.parallelism = *opt.parallelism;
  }
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (opt.replications) {
    if (*opt.replications < 1) throw ConfigError("replications", "must be >= 1");
    cfg.replications = *opt.replications;
  }
}

void cmd_simulate(const std::string& config_path, const CommandOptions& opt) {
  RunConfig cfg = load_config_file(config_path);
  apply_overrides(cfg, opt);
  const auto points = expand_config(cfg);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  CsvWriter summary((dir / "summary.csv").string());
  summary.field("design").field("model").field("e").field("T").field("d").field("x")
      .field("estimator").field("replications").field("mean").field("q1").field("median")
      .field("q3").field("min").field("max").field("mean_acceleration");
  summary.end_row();
  CsvWriter alpha((dir / "summary_alpha.csv").string());
  alpha.field("design").field("model").field("e").field("T").field("d").field("x")
      .field("source").field("role").field("mean_alpha");
  alpha.end_row();

  for (const auto& p : points) {
    const auto results = run_design(p.design, cfg.parallelism);
    const auto ds = summarize_design(p.design, results);
    write_results_csv(dir / ("results_" + p.point_id + ".csv"), p, results);
    append_summary_rows(summary, alpha, p, ds);
  }
  write_manifest(dir, "simulate", {}, cfg);
}

void cmd_reproduce(const std::string& suite, const CommandOptions& opt) {
  if (suite != "table1" && suite != "figures" && suite != "all")
    throw ConfigError("suite", "must be one of table1, figures, all");
  RunConfig cfg = reproduction_config();
  apply_overrides(cfg, opt);
  const bool want_table = suite != "figures";
  const bool want_figures = suite != "table1";

  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  if (want_figures) fs::create_directories(dir / "figure_data");

  std::optional<CsvWriter> table;
  if (want_table) {
    table.emplace((dir / "table1_alpha.csv").string());
    table->field("model").field("e").field("T").field("source").field("role")
        .field("mean_alpha");
    table->end_row();
  }
  std::optional<CsvWriter> errors;
  if (want_figures) {
    errors.emplace((dir / "scaled_errors.csv").string());
    errors->field("model").field("e").field("T").field("N").field("estimator")
        .field("replications").field("mean").field("q1").field("median").field("q3");
    errors->end_row();
  }

  std::optional<CsvWriter> box;
  std::string box_model;
  const auto open_box = [&](const std::string& model) {
    if (box && box_model == model) return;
    box.emplace((dir / "figure_data" / (model + "_box.csv")).string());
    box_model = model;
    box->field("model").field("e").field("T").field("N").field("estimator").field("mean")
        .field("q1").field("median").field("q3").field("whisker_low").field("whisker_high")
        .field("min").field("max");
    box->end_row();
  };

  for (const auto& p : expand_config(cfg)) {
    const auto results = run_design(p.design, cfg.parallelism);
    const auto ds = summarize_design(p.design, results);
    const auto& cell0 = ds.cells.front();
    const std::string model = model_name(p.model);
    const auto n_arm = static_cast<std::int64_t>(std::llround(cell0.mean_count));

    if (want_table) {
      const double truth = p.design.environment.truth(0, 0);
      for (std::size_t s = 0; s < p.design.sources.size(); ++s) {
        const auto& src = p.design.sources[s];
        table->field(model).field(*p.e).field(static_cast<std::int64_t>(p.T))
            .field(src.name)
            .field(source_role(src.prior(p.design.environment, 0, 0), truth))
            .field(cell0.mean_weights[s]);
        table->end_row();
      }
    }

    if (want_figures) {
      const auto emit = [&](const char* estimator, const EstimatorSummary& es,
                            std::vector<double> errs) {
        errors->field(model).field(*p.e).field(static_cast<std::int64_t>(p.T)).field(n_arm)
            .field(estimator).field(es.replications).field(es.mean).field(es.q1)
            .field(es.median).field(es.q3);
        errors->end_row();
        std::sort(errs.begin(), errs.end());
        const BoxStats b = box_from_sorted(errs);
        open_box(model);
        box->field(model).field(*p.e).field(static_cast<std::int64_t>(p.T)).field(n_arm)
            .field(estimator).field(b.mean).field(b.q1).field(b.median).field(b.q3)
            .field(b.whisker_low).field(b.whisker_high).field(b.min).field(b.max);
        box->end_row();
      };
      std::vector<double> bma_errs, std_errs;
      bma_errs.reserve(results.size());
      std_errs.reserve(results.size());
      for (const auto& r : results) {
        const auto& c = r.cells.front();
        bma_errs.push_back(scaled_abs_error(c.bma_estimate, c.truth, c.count));
        if (c.standard_estimate)
          std_errs.push_back(scaled_abs_error(*c.standard_estimate, c.truth, c.count));
      }
      emit("bma", cell0.bma_scaled_error, std::move(bma_errs));
      if (cell0.standard_scaled_error && !std_errs.empty())
        emit("standard", *cell0.standard_scaled_error, std::move(std_errs));
    }
  }
  write_manifest(dir, "reproduce", {{"suite", suite}}, cfg);
}

void cmd_diagnose(const std::string& kind, const std::string& config_path,
                  const CommandOptions& opt) {
  RunConfig cfg = load_config_file(config_path);
  apply_overrides(cfg, opt);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  CsvWriter w((dir / "diagnostics.csv").string());
  write_diag_header(w);
  if (kind == "rates")
    diagnose_rates(cfg, w);
  else if (kind == "decay")
    diagnose_decay(cfg, w);
  else if (kind == "divergence")
    diagnose_divergence(cfg, w);
  else if (kind == "pac")
    diagnose_pac(cfg, w);
  else
    throw ConfigError("kind", "must be one of rates, decay, divergence, pac");
  write_manifest(dir, "diagnose", {{"kind", kind}}, cfg);
}

void cmd_validate_config(const std::string& config_path) {
  const RunConfig cfg = load_config_file(config_path);
  const auto points = expand_config(cfg);
  std::printf("ok: %zu design entries, %zu design points\n", cfg.designs.size(), points.size());
}

}  // namespace evbma
