#include "evbma/config.hpp"

#include "evbma/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace evbma {

namespace {

using Json = nlohmann::ordered_json;

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::string key(const std::string& path, const std::string& k) {
  return path.empty() ? k : path + "." + k;
}

const Json& require(const Json& j, const std::string& path, const std::string& k) {
  if (!j.contains(k)) throw ConfigError(path, "missing field '" + k + "'");
  return j.at(k);
}

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void expect_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
}

void reject_unknown(const Json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return k == a; }) == allowed.end())
      throw ConfigError(path, "unknown field '" + k + "'");
  }
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::int64_t get_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_uint64(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(path, "expected a non-negative integer");
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected a boolean");
  return j.get<bool>();
}

PrecisionSchedule parse_schedule(const Json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(require(j, path, "kind"), key(path, "kind"));
  try {
    if (kind == "constant") {
      reject_unknown(j, path, {"kind", "nu0"});
      return PrecisionSchedule::constant(get_double(require(j, path, "nu0"), key(path, "nu0")));
    }
    if (kind == "linear_in_arm_count") {
      reject_unknown(j, path, {"kind", "rate"});
      return PrecisionSchedule::linear_in_arm_count(
          get_double(require(j, path, "rate"), key(path, "rate")));
    }
    if (kind == "fixed_at_design") {
      reject_unknown(j, path, {"kind", "rate"});
      return PrecisionSchedule::fixed_at_design(
          get_double(require(j, path, "rate"), key(path, "rate")));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(key(path, "kind"),
                    "must be one of constant, linear_in_arm_count, fixed_at_design");
}

std::vector<double> parse_double_array(const Json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], item(path, i)));
  return out;
}

PolicySpec parse_policy(const Json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(require(j, path, "kind"), key(path, "kind"));
  try {
    if (kind == "rct") {
      reject_unknown(j, path, {"kind", "probabilities"});
      return PolicySpec::rct(parse_double_array(require(j, path, "probabilities"),
                                                key(path, "probabilities")));
    }
    if (kind == "alternating") {
      reject_unknown(j, path, {"kind", "arms"});
      return PolicySpec::alternating(
          static_cast<int>(get_int(require(j, path, "arms"), key(path, "arms"))));
    }
    if (kind == "epsilon_greedy") {
      reject_unknown(j, path, {"kind", "epsilon0", "kappa"});
      return PolicySpec::epsilon_greedy(
          get_double(require(j, path, "epsilon0"), key(path, "epsilon0")),
          get_double(require(j, path, "kappa"), key(path, "kappa")));
    }
    if (kind == "thompson") {
      reject_unknown(j, path, {"kind", "prior_means", "prior_precisions"});
      return PolicySpec::thompson(
          parse_double_array(require(j, path, "prior_means"), key(path, "prior_means")),
          parse_double_array(require(j, path, "prior_precisions"),
                             key(path, "prior_precisions")));
    }
    if (kind == "ucb") {
      reject_unknown(j, path, {"kind", "rho"});
      return PolicySpec::ucb(get_double(require(j, path, "rho"), key(path, "rho")));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(key(path, "kind"),
                    "must be one of rct, alternating, epsilon_greedy, thompson, ucb");
}

OutcomeDist parse_dist(const Json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(require(j, path, "dist"), key(path, "dist"));
  OutcomeDist d;
  d.mean = get_double(require(j, path, "mean"), key(path, "mean"));
  if (kind == "gaussian") {
    reject_unknown(j, path, {"arm", "covariate", "dist", "mean", "sd"});
    d.kind = OutcomeDist::Kind::Gaussian;
    d.param = get_double(require(j, path, "sd"), key(path, "sd"));
  } else if (kind == "bernoulli") {
    reject_unknown(j, path, {"arm", "covariate", "dist", "mean"});
    d.kind = OutcomeDist::Kind::Bernoulli;
    d.param = 0.0;
  } else if (kind == "shifted_lognormal") {
    reject_unknown(j, path, {"arm", "covariate", "dist", "mean", "shape"});
    d.kind = OutcomeDist::Kind::ShiftedLogNormal;
    d.param = get_double(require(j, path, "shape"), key(path, "shape"));
  } else if (kind == "constant") {
    reject_unknown(j, path, {"arm", "covariate", "dist", "mean"});
    d.kind = OutcomeDist::Kind::Constant;
    d.param = 0.0;
  } else {
    throw ConfigError(key(path, "dist"),
                      "must be one of gaussian, bernoulli, shifted_lognormal, constant");
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return d;
}

std::pair<int, int> parse_cell_key(const Json& j, const std::string& path, int arms,
                                   int covariates) {
  const int arm = static_cast<int>(get_int(require(j, path, "arm"), key(path, "arm")));
  const int cov =
      static_cast<int>(get_int(require(j, path, "covariate"), key(path, "covariate")));
  if (arm < 0 || arm >= arms) throw ConfigError(key(path, "arm"), "out of range");
  if (cov < 0 || cov >= covariates) throw ConfigError(key(path, "covariate"), "out of range");
  return {arm, cov};
}

Environment parse_environment(const Json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"arms", "covariates", "cells"});
  Environment env;
  env.arms = static_cast<int>(get_int(require(j, path, "arms"), key(path, "arms")));
  env.covariates =
      static_cast<int>(get_int(require(j, path, "covariates"), key(path, "covariates")));
  if (env.arms < 2) throw ConfigError(key(path, "arms"), "need at least two arms");
  if (env.covariates < 1) throw ConfigError(key(path, "covariates"), "need at least one");
  const Json& cells = require(j, path, "cells");
  expect_array(cells, key(path, "cells"));
  env.cells.resize(static_cast<std::size_t>(env.arms) * static_cast<std::size_t>(env.covariates));
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string p = item(key(path, "cells"), i);
    const auto [arm, cov] = parse_cell_key(cells[i], p, env.arms, env.covariates);
    if (!seen.insert({arm, cov}).second) throw ConfigError(p, "duplicate cell");
    env.cells[env.index(arm, cov)] = parse_dist(cells[i], p);
  }
  if (seen.size() != env.cells.size())
    throw ConfigError(key(path, "cells"), "must cover every (arm, covariate) cell");
  return env;
}

Source parse_source(const Json& j, const std::string& path, const Environment& env) {
  expect_object(j, path);
  reject_unknown(j, path, {"name", "priors"});
  Source s;
  s.name = get_string(require(j, path, "name"), key(path, "name"));
  if (s.name.empty()) throw ConfigError(key(path, "name"), "must be non-empty");
  const Json& priors = require(j, path, "priors");
  expect_array(priors, key(path, "priors"));
  s.cell_priors.resize(env.cells.size());
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const std::string p = item(key(path, "priors"), i);
    expect_object(priors[i], p);
    reject_unknown(priors[i], p, {"arm", "covariate", "mean", "schedule", "diffuse_cap"});
    const auto [arm, cov] = parse_cell_key(priors[i], p, env.arms, env.covariates);
    if (!seen.insert({arm, cov}).second) throw ConfigError(p, "duplicate cell");
    SourcePrior prior;
    prior.prior_mean = get_double(require(priors[i], p, "mean"), key(p, "mean"));
    prior.schedule = parse_schedule(require(priors[i], p, "schedule"), key(p, "schedule"));
    if (priors[i].contains("diffuse_cap")) {
      const double cap = get_double(priors[i].at("diffuse_cap"), key(p, "diffuse_cap"));
      if (!(cap > 0.0)) throw ConfigError(key(p, "diffuse_cap"), "must be > 0");
      prior.diffuse_cap = cap;
    }
    s.cell_priors[env.index(arm, cov)] = prior;
  }
  if (seen.size() != env.cells.size())
    throw ConfigError(key(path, "priors"), "must cover every (arm, covariate) cell");
  return s;
}

int benchmark_source_count(ModelId id) {
  return id == ModelId::Model3 ? 3 : 2;
}

void parse_prior_probs(const Json& j, const std::string& path, std::size_t n_sources,
                       std::vector<double>& out) {
  out = parse_double_array(j, path);
  if (out.size() != n_sources)
    throw ConfigError(path, "must have one probability per source");
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] >= 0.0)) throw ConfigError(item(path, i), "must be >= 0");
    total += out[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError(path, "must sum to 1");
}

DesignEntry parse_design(const Json& j, const std::string& path) {
  expect_object(j, path);
  DesignEntry d;
  d.id = get_string(require(j, path, "id"), key(path, "id"));
  if (d.id.empty()) throw ConfigError(key(path, "id"), "must be non-empty");
  const std::string model = get_string(require(j, path, "model"), key(path, "model"));
  if (model == "model1") d.model = ModelId::Model1;
  else if (model == "model2") d.model = ModelId::Model2;
  else if (model == "model3") d.model = ModelId::Model3;
  else if (model == "custom") d.model = ModelId::Custom;
  else throw ConfigError(key(path, "model"),
                         "must be one of model1, model2, model3, custom");

  const Json& tj = require(j, path, "T");
  expect_array(tj, key(path, "T"));
  if (tj.empty()) throw ConfigError(key(path, "T"), "must be non-empty");
  for (std::size_t i = 0; i < tj.size(); ++i) {
    const auto t = get_int(tj[i], item(key(path, "T"), i));
    if (t < 2) throw ConfigError(item(key(path, "T"), i), "horizon must be >= 2");
    if (d.model != ModelId::Custom && t % 2 != 0)
      throw ConfigError(item(key(path, "T"), i), "benchmark-model horizon must be even");
    d.t_grid.push_back(static_cast<int>(t));
  }

  if (d.model == ModelId::Custom) {
    reject_unknown(j, path,
                   {"id", "model", "T", "policy", "environment", "sources",
                    "prior_model_probs"});
    d.environment =
        parse_environment(require(j, path, "environment"), key(path, "environment"));
    const Json& sj = require(j, path, "sources");
    expect_array(sj, key(path, "sources"));
    if (sj.empty()) throw ConfigError(key(path, "sources"), "must be non-empty");
    std::set<std::string> names;
    for (std::size_t i = 0; i < sj.size(); ++i) {
      d.sources.push_back(parse_source(sj[i], item(key(path, "sources"), i), *d.environment));
      if (!names.insert(d.sources.back().name).second)
        throw ConfigError(item(key(path, "sources"), i), "duplicate source name");
    }
    if (j.contains("prior_model_probs"))
      parse_prior_probs(j.at("prior_model_probs"), key(path, "prior_model_probs"),
                        d.sources.size(), d.prior_model_probs);
  } else {
    reject_unknown(j, path, {"id", "model", "e", "T", "policy", "prior_model_probs"});
    const Json& ej = require(j, path, "e");
    expect_array(ej, key(path, "e"));
    if (ej.empty()) throw ConfigError(key(path, "e"), "must be non-empty");
    for (std::size_t i = 0; i < ej.size(); ++i) {
      const double e = get_double(ej[i], item(key(path, "e"), i));
      if (!(e > 0.0)) throw ConfigError(item(key(path, "e"), i), "must be > 0");
      d.e_grid.push_back(e);
    }
    if (j.contains("prior_model_probs"))
      parse_prior_probs(j.at("prior_model_probs"), key(path, "prior_model_probs"),
                        static_cast<std::size_t>(benchmark_source_count(d.model)),
                        d.prior_model_probs);
  }
  if (j.contains("policy")) d.policy = parse_policy(j.at("policy"), key(path, "policy"));
  return d;
}

PacRequest parse_pac(const Json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"epsilon", "acceleration", "design"});
  PacRequest r;
  r.epsilon = get_double(require(j, path, "epsilon"), key(path, "epsilon"));
  if (!(r.epsilon > 0.0) || r.epsilon >= 1.0)
    throw ConfigError(key(path, "epsilon"), "must lie in (0,1)");
  if (j.contains("acceleration")) {
    const double a = get_double(j.at("acceleration"), key(path, "acceleration"));
    if (!(a > 0.0) || a > 1.0)
      throw ConfigError(key(path, "acceleration"), "must lie in (0,1]");
    r.acceleration = a;
  }
  if (j.contains("design")) r.design_id = get_string(j.at("design"), key(path, "design"));
  if (!r.acceleration && !r.design_id)
    throw ConfigError(path, "needs either 'acceleration' or 'design'");
  if (r.acceleration && r.design_id)
    throw ConfigError(path, "give 'acceleration' or 'design', not both");
  return r;
}

DiagnosticsConfig parse_diagnostics(const Json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"horizon", "use_ell", "pac"});
  DiagnosticsConfig d;
  if (j.contains("horizon")) {
    d.horizon = get_int(j.at("horizon"), key(path, "horizon"));
    if (d.horizon < 100) throw ConfigError(key(path, "horizon"), "must be >= 100");
  }
  if (j.contains("use_ell")) d.use_ell = get_bool(j.at("use_ell"), key(path, "use_ell"));
  if (j.contains("pac")) {
    const Json& pj = j.at("pac");
    expect_array(pj, key(path, "pac"));
    for (std::size_t i = 0; i < pj.size(); ++i)
      d.pac.push_back(parse_pac(pj[i], item(key(path, "pac"), i)));
  }
  return d;
}

Json schedule_to_json(const PrecisionSchedule& s) {
  Json j;
  switch (s.kind) {
    case PrecisionSchedule::Kind::Constant:
      j["kind"] = "constant";
      j["nu0"] = s.value;
      break;
    case PrecisionSchedule::Kind::LinearInArmCount:
      j["kind"] = "linear_in_arm_count";
      j["rate"] = s.value;
      break;
    case PrecisionSchedule::Kind::FixedAtDesign:
      j["kind"] = "fixed_at_design";
      j["rate"] = s.value;
      break;
  }
  return j;
}

Json policy_to_json(const PolicySpec& p) {
  Json j;
  j["kind"] = p.kind_name();
  switch (p.kind) {
    case PolicySpec::Kind::Rct:
      j["probabilities"] = p.rct_probabilities;
      break;
    case PolicySpec::Kind::Alternating:
      j["arms"] = p.alternating_arms;
      break;
    case PolicySpec::Kind::EpsilonGreedy:
      j["epsilon0"] = p.epsilon0;
      j["kappa"] = p.kappa;
      break;
    case PolicySpec::Kind::Thompson:
      j["prior_means"] = p.thompson_prior_means;
      j["prior_precisions"] = p.thompson_prior_precisions;
      break;
    case PolicySpec::Kind::Ucb:
      j["rho"] = p.rho;
      break;
  }
  return j;
}

Json environment_to_json(const Environment& env) {
  Json j;
  j["arms"] = env.arms;
  j["covariates"] = env.covariates;
  Json cells = Json::array();
  for (int x = 0; x < env.covariates; ++x) {
    for (int a = 0; a < env.arms; ++a) {
      const auto& c = env.cell(a, x);
      Json cj;
      cj["arm"] = a;
      cj["covariate"] = x;
      switch (c.kind) {
        case OutcomeDist::Kind::Gaussian:
          cj["dist"] = "gaussian";
          cj["mean"] = c.mean;
          cj["sd"] = c.param;
          break;
        case OutcomeDist::Kind::Bernoulli:
          cj["dist"] = "bernoulli";
          cj["mean"] = c.mean;
          break;
        case OutcomeDist::Kind::ShiftedLogNormal:
          cj["dist"] = "shifted_lognormal";
          cj["mean"] = c.mean;
          cj["shape"] = c.param;
          break;
        case OutcomeDist::Kind::Constant:
          cj["dist"] = "constant";
          cj["mean"] = c.mean;
          break;
      }
      cells.push_back(cj);
    }
  }
  j["cells"] = cells;
  return j;
}

Json source_to_json(const Source& s, const Environment& env) {
  Json j;
  j["name"] = s.name;
  Json priors = Json::array();
  for (int x = 0; x < env.covariates; ++x) {
    for (int a = 0; a < env.arms; ++a) {
      const auto& p = s.prior(env, a, x);
      Json pj;
      pj["arm"] = a;
      pj["covariate"] = x;
      pj["mean"] = p.prior_mean;
      pj["schedule"] = schedule_to_json(p.schedule);
      if (p.diffuse_cap) pj["diffuse_cap"] = *p.diffuse_cap;
      priors.push_back(pj);
    }
  }
  j["priors"] = priors;
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  expect_object(j, "");
  reject_unknown(j, "",
                 {"designs", "replications", "base_seed", "parallelism", "output_dir",
                  "output_formats", "working_variance", "record_trajectory", "diagnostics"});

  RunConfig cfg;
  const Json& dj = require(j, "", "designs");
  expect_array(dj, "designs");
  if (dj.empty()) throw ConfigError("designs", "must be non-empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < dj.size(); ++i) {
    cfg.designs.push_back(parse_design(dj[i], item("designs", i)));
    if (!ids.insert(cfg.designs.back().id).second)
      throw ConfigError(item("designs", i), "duplicate design id");
  }
  if (j.contains("replications")) {
    cfg.replications = static_cast<int>(get_int(j.at("replications"), "replications"));
    if (cfg.replications < 1) throw ConfigError("replications", "must be >= 1");
  }
  if (j.contains("base_seed")) cfg.base_seed = get_uint64(j.at("base_seed"), "base_seed");
  if (j.contains("parallelism")) {
    cfg.parallelism = static_cast<int>(get_int(j.at("parallelism"), "parallelism"));
    if (cfg.parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
  }
  if (j.contains("output_dir")) {
    cfg.output_dir = get_string(j.at("output_dir"), "output_dir");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must be non-empty");
  }
  if (j.contains("output_formats")) {
    const Json& fj = j.at("output_formats");
    expect_array(fj, "output_formats");
    if (fj.empty()) throw ConfigError("output_formats", "must be non-empty");
    cfg.output_formats.clear();
    for (std::size_t i = 0; i < fj.size(); ++i) {
      const std::string f = get_string(fj[i], item("output_formats", i));
      if (f != "csv")
        throw ConfigError(item("output_formats", i), "unsupported format '" + f + "'");
      cfg.output_formats.push_back(f);
    }
  }
  if (j.contains("working_variance")) {
    cfg.working_variance = get_double(j.at("working_variance"), "working_variance");
    if (!(cfg.working_variance > 0.0))
      throw ConfigError("working_variance", "must be > 0");
  }
  if (j.contains("record_trajectory"))
    cfg.record_trajectory = get_bool(j.at("record_trajectory"), "record_trajectory");
  if (j.contains("diagnostics"))
    cfg.diagnostics = parse_diagnostics(j.at("diagnostics"), "diagnostics");

  // pac design references must resolve
  for (std::size_t i = 0; i < cfg.diagnostics.pac.size(); ++i) {
    const auto& r = cfg.diagnostics.pac[i];
    if (r.design_id && !ids.contains(*r.design_id))
      throw ConfigError(key(item("diagnostics.pac", i), "design"),
                        "no design with id '" + *r.design_id + "'");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  Json j;
  Json designs = Json::array();
  for (const auto& d : cfg.designs) {
    Json dj;
    dj["id"] = d.id;
    dj["model"] = model_name(d.model);
    if (d.model != ModelId::Custom) dj["e"] = d.e_grid;
    dj["T"] = d.t_grid;
    if (d.policy) dj["policy"] = policy_to_json(*d.policy);
    if (d.model == ModelId::Custom) {
      dj["environment"] = environment_to_json(*d.environment);
      Json sources = Json::array();
      for (const auto& s : d.sources) sources.push_back(source_to_json(s, *d.environment));
      dj["sources"] = sources;
    }
    if (!d.prior_model_probs.empty()) dj["prior_model_probs"] = d.prior_model_probs;
    designs.push_back(dj);
  }
  j["designs"] = designs;
  j["replications"] = cfg.replications;
  j["base_seed"] = cfg.base_seed;
  j["parallelism"] = cfg.parallelism;
  j["output_dir"] = cfg.output_dir;
  j["output_formats"] = cfg.output_formats;
  j["working_variance"] = cfg.working_variance;
  j["record_trajectory"] = cfg.record_trajectory;
  Json diag;
  diag["horizon"] = cfg.diagnostics.horizon;
  diag["use_ell"] = cfg.diagnostics.use_ell;
  Json pac = Json::array();
  for (const auto& r : cfg.diagnostics.pac) {
    Json rj;
    rj["epsilon"] = r.epsilon;
    if (r.acceleration) rj["acceleration"] = *r.acceleration;
    if (r.design_id) rj["design"] = *r.design_id;
    pac.push_back(rj);
  }
  diag["pac"] = pac;
  j["diagnostics"] = diag;
  return j.dump(2) + "\n";
}

std::vector<ExpandedPoint> expand_config(const RunConfig& cfg) {
  std::vector<ExpandedPoint> points;
  for (std::size_t i = 0; i < cfg.designs.size(); ++i) {
    const auto& entry = cfg.designs[i];
    const auto make_point = [&](std::optional<double> e, int T) {
      ExpandedPoint p;
      p.design_id = entry.id;
      p.model = entry.model;
      p.e = e;
      p.T = T;
      if (entry.model != ModelId::Custom) {
        p.design = build_benchmark_model(entry.model, *e, T);
        p.point_id = entry.id + "_e" + format_double(*e) + "_T" + std::to_string(T);
      } else {
        p.design.model_id = ModelId::Custom;
        p.design.evidence_scale = 0.0;
        p.design.horizon = T;
        p.design.environment = *entry.environment;
        p.design.sources = entry.sources;
        p.design.policy = PolicySpec::alternating(entry.environment->arms);
        p.point_id = entry.id + "_T" + std::to_string(T);
      }
      if (entry.policy) p.design.policy = *entry.policy;
      p.design.prior_model_probs = entry.prior_model_probs;
      p.design.replications = cfg.replications;
      p.design.base_seed = cfg.base_seed;
      p.design.working.variance = cfg.working_variance;
      if (cfg.record_trajectory) {
        p.design.weight_checkpoints.clear();
        for (int t : kBenchmarkHorizons)
          if (t <= T) p.design.weight_checkpoints.push_back(t);
      } else {
        p.design.weight_checkpoints.clear();
      }
      try {
        p.design.validate();
      } catch (const std::invalid_argument& e2) {
        throw ConfigError(item("designs", i), e2.what());
      }
      return p;
    };
    if (entry.model != ModelId::Custom) {
      for (double e : entry.e_grid)
        for (int T : entry.t_grid) points.push_back(make_point(e, T));
    } else {
      for (int T : entry.t_grid) points.push_back(make_point(std::nullopt, T));
    }
  }
  return points;
}

std::string source_role(const SourcePrior& prior, double truth) {
  if (prior.is_diffuse()) return "diffuse";
  return prior.prior_mean == truth ? "unbiased" : "biased";
}

}  // namespace evbma
