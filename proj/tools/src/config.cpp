#include "vprisk_cli/config.hpp"

#include <vprisk/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace vprisk::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "profile",      "gamma",        "gamma1_sq",    "gamma2_sq",
    "gamma3_sq",    "tau",          "profile_csv",  "class_probs",
    "class_variances", "profile_seed", "normalize",  "test_profile",
    "alpha",        "sigma",        "n",            "p",
    "ratios",       "ratio_min",    "ratio_max",    "ratio_count",
    "ratio_scale",  "lambdas",      "lambda_min",   "lambda_max",
    "lambda_count", "lambda_scale", "entry_dist",   "seed",
    "replications", "mc_draws",     "d_star",       "emp_ridgeless_lambda",
    "out",          "quantities"};

const std::set<std::string> kProfiles = {"constant",   "quasi_ds",   "piecewise", "block",
                                         "alternated", "polynomial", "mixture",   "csv"};

template <class T>
T get(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type (got " +
                      doc.at(key).type_name() + ")");
  }
}

double get_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) {
    throw ConfigError(std::string("key '") + key + "' must be a number");
  }
  return doc.at(key).get<double>();
}

std::int64_t get_int(const json& doc, const char* key, std::int64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("key '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<double> expand_grid(const json& doc, const std::string& prefix, const char* explicit_key) {
  const std::string kmin = prefix + "_min", kmax = prefix + "_max", kcount = prefix + "_count",
                    kscale = prefix + "_scale";
  const bool has_range = doc.contains(kmin) || doc.contains(kmax) || doc.contains(kcount);
  const std::string scale = get<std::string>(doc, kscale.c_str(), has_range ? "log" : "explicit");
  if (doc.contains(explicit_key)) {
    if (has_range) {
      throw ConfigError(std::string("give either '") + explicit_key + "' or " + kmin + "/" + kmax +
                        "/" + kcount + ", not both");
    }
    if (scale != "explicit") throw ConfigError(kscale + " must be 'explicit' when '" + explicit_key + "' is given");
    const std::vector<double> v = get<std::vector<double>>(doc, explicit_key, {});
    if (v.empty()) throw ConfigError(std::string("'") + explicit_key + "' is empty");
    return v;
  }
  if (!has_range) return {};
  if (scale != "log" && scale != "linear") {
    throw ConfigError(kscale + " must be 'log' or 'linear' (got '" + scale + "')");
  }
  if (!doc.contains(kmin) || !doc.contains(kmax) || !doc.contains(kcount)) {
    throw ConfigError(kmin + ", " + kmax + " and " + kcount + " must be given together");
  }
  const double lo = get_number(doc, kmin.c_str(), 0), hi = get_number(doc, kmax.c_str(), 0);
  const std::int64_t count = get_int(doc, kcount.c_str(), 0);
  if (count < 1) throw ConfigError(kcount + " must be at least 1");
  if (!(hi >= lo)) throw ConfigError(kmax + " must not be below " + kmin);
  if (scale == "log" && !(lo > 0)) throw ConfigError(kmin + " must be positive on a log scale");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : double(k) / double(count - 1);
    grid[k] = scale == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  grid.back() = hi;
  return grid;
}

std::vector<std::string> default_quantities(Command c) {
  switch (c) {
    case Command::Profile: return {};
    case Command::RiskSweep: return {"det", "emp", "dof"};
    case Command::Descent: return {"det"};
    case Command::Eig: return {"eig"};
    case Command::Gcv: return {"det", "emp", "gcv"};
  }
  return {};
}

std::set<std::string> allowed_quantities(Command c) {
  switch (c) {
    case Command::Profile: return {};
    case Command::RiskSweep: return {"det", "emp", "mc", "gcv", "dof"};
    case Command::Descent: return {"det", "emp"};
    case Command::Eig: return {"eig"};
    case Command::Gcv: return {"det", "emp", "gcv"};
  }
  return {};
}

bool fixed_dimensions(const std::string& profile) { return profile == "csv" || profile == "mixture"; }

}  // namespace

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::Profile: return "profile";
    case Command::RiskSweep: return "risk-sweep";
    case Command::Descent: return "descent";
    case Command::Eig: return "eig";
    case Command::Gcv: return "gcv";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Profile, Command::RiskSweep, Command::Descent, Command::Eig, Command::Gcv}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

bool ExperimentConfig::wants(const std::string& q) const {
  return std::find(quantities.begin(), quantities.end(), q) != quantities.end();
}

ExperimentConfig parse_config(const json& doc, Command command) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!kKeys.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }

  ExperimentConfig c;
  c.command = command;
  c.profile = get<std::string>(doc, "profile", c.profile);
  if (!kProfiles.count(c.profile)) throw ConfigError("unknown profile kind '" + c.profile + "'");
  c.gamma = get_number(doc, "gamma", c.gamma);
  c.gamma1_sq = get_number(doc, "gamma1_sq", c.gamma1_sq);
  c.gamma2_sq = get_number(doc, "gamma2_sq", c.gamma2_sq);
  c.gamma3_sq = get_number(doc, "gamma3_sq", c.gamma3_sq);
  c.tau = get_number(doc, "tau", c.tau);
  c.profile_csv = get<std::string>(doc, "profile_csv", "");
  c.class_probs = get<std::vector<double>>(doc, "class_probs", {});
  c.class_variances = get<std::vector<std::vector<double>>>(doc, "class_variances", {});
  c.profile_seed = get<std::uint64_t>(doc, "profile_seed", c.profile_seed);
  c.normalize = get<bool>(doc, "normalize", c.normalize);

  if (c.profile == "csv" && c.profile_csv.empty()) throw ConfigError("profile 'csv' needs 'profile_csv'");
  if (c.profile != "csv" && !c.profile_csv.empty()) throw ConfigError("'profile_csv' requires profile 'csv'");
  if (c.profile == "mixture" && (c.class_probs.empty() || c.class_variances.empty())) {
    throw ConfigError("profile 'mixture' needs 'class_probs' and 'class_variances'");
  }

  if (doc.contains("test_profile")) {
    const json& t = doc.at("test_profile");
    if (t.is_string()) {
      if (t.get<std::string>() != "columns") {
        throw ConfigError("test_profile must be \"columns\" or an array of weights");
      }
    } else {
      c.test_weights = get<std::vector<double>>(doc, "test_profile", {});
      if (c.test_weights.empty()) throw ConfigError("test_profile weights are empty");
    }
  }

  c.params.alpha = get_number(doc, "alpha", 1.0);
  c.params.sigma = get_number(doc, "sigma", 1.0);
  if (!(c.params.alpha >= 0) || !(c.params.sigma >= 0)) throw ConfigError("alpha and sigma must be >= 0");

  const std::int64_t n = get_int(doc, "n", 0);
  if (doc.contains("p")) {
    const std::int64_t p = get_int(doc, "p", 0);
    if (p < 1) throw ConfigError("p must be positive");
    c.p = p;
  }
  c.ratios = expand_grid(doc, "ratio", "ratios");
  c.lambdas = expand_grid(doc, "lambda", "lambdas");

  if (c.p && !c.ratios.empty()) throw ConfigError("give exactly one of 'p' or a ratio grid");
  const bool sweeps_ratio = command == Command::Descent || command == Command::Eig;
  if (sweeps_ratio) {
    if (c.ratios.empty()) throw ConfigError(std::string(to_string(command)) + " needs a ratio grid");
    if (fixed_dimensions(c.profile)) {
      throw ConfigError("profile '" + c.profile + "' has fixed dimensions and cannot be swept over p/n");
    }
    for (double r : c.ratios) {
      if (!(r > 0)) throw ConfigError("ratios must be positive");
    }
  } else {
    if (!c.ratios.empty()) throw ConfigError(std::string(to_string(command)) + " takes 'p', not a ratio grid");
    if (!c.p && c.profile != "csv" && c.profile != "mixture") {
      throw ConfigError(std::string(to_string(command)) + " needs 'p'");
    }
  }
  if (c.profile == "csv") {
    if (doc.contains("n") || c.p) throw ConfigError("profile 'csv' takes its dimensions from the file");
  } else if (n < 1) {
    throw ConfigError("n must be a positive integer");
  }
  c.n = n;
  if (c.profile == "mixture") {
    if (c.p) throw ConfigError("profile 'mixture' takes p from 'class_variances'");
    c.p = static_cast<Index>(c.class_variances.front().size());
  }

  if (command == Command::RiskSweep || command == Command::Gcv) {
    if (c.lambdas.empty()) throw ConfigError(std::string(to_string(command)) + " needs a lambda grid");
    for (double l : c.lambdas) {
      if (!(l > 0)) throw ConfigError("lambda grid must be strictly positive");
    }
    if (!std::is_sorted(c.lambdas.begin(), c.lambdas.end()) ||
        std::adjacent_find(c.lambdas.begin(), c.lambdas.end()) != c.lambdas.end()) {
      throw ConfigError("lambda grid must be strictly increasing");
    }
  } else if (!c.lambdas.empty()) {
    throw ConfigError(std::string(to_string(command)) + " takes no lambda grid");
  }

  try {
    c.entry_dist = parse_entry_dist(get<std::string>(doc, "entry_dist", "gaussian"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  c.seed = get<std::uint64_t>(doc, "seed", 0);
  c.replications = static_cast<int>(get_int(doc, "replications", 1));
  if (c.replications < 1) throw ConfigError("replications must be at least 1");
  c.mc_draws = static_cast<int>(get_int(doc, "mc_draws", c.mc_draws));
  if (c.mc_draws < 2) throw ConfigError("mc_draws must be at least 2");
  c.d_star = get_number(doc, "d_star", c.d_star);
  if (!(c.d_star >= 0)) throw ConfigError("d_star must be >= 0");
  c.emp_ridgeless_lambda = get_number(doc, "emp_ridgeless_lambda", c.emp_ridgeless_lambda);
  if (!(c.emp_ridgeless_lambda > 0)) throw ConfigError("emp_ridgeless_lambda must be positive");
  c.out = get<std::string>(doc, "out", "");

  const std::set<std::string> allowed = allowed_quantities(command);
  if (doc.contains("quantities")) {
    c.quantities = get<std::vector<std::string>>(doc, "quantities", {});
    if (command == Command::Profile) {
      if (!c.quantities.empty()) throw ConfigError("profile takes no quantities");
    } else if (c.quantities.empty()) {
      throw ConfigError("quantities is empty: nothing to compute");
    }
    for (const std::string& q : c.quantities) {
      if (!allowed.count(q)) {
        throw ConfigError("quantity '" + q + "' is not available for " + to_string(command));
      }
    }
    std::sort(c.quantities.begin(), c.quantities.end());
    c.quantities.erase(std::unique(c.quantities.begin(), c.quantities.end()), c.quantities.end());
  } else {
    c.quantities = default_quantities(command);
  }
  if (command == Command::RiskSweep && !c.wants("det") && !c.wants("emp") && !c.wants("mc")) {
    throw ConfigError("quantities must include at least one of det, emp, mc");
  }
  if (command == Command::Gcv && !c.wants("det") && !c.wants("emp")) {
    throw ConfigError("quantities must include det or emp");
  }
  if (command == Command::Descent && !c.test_weights.empty()) {
    throw ConfigError("descent changes p per point; use test_profile \"columns\"");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, command);
}

json resolved_json(const ExperimentConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["profile"] = c.profile;
  if (c.profile == "constant") j["gamma"] = c.gamma;
  if (c.profile == "piecewise" || c.profile == "block" || c.profile == "alternated") {
    j["gamma1_sq"] = c.gamma1_sq;
    j["gamma2_sq"] = c.gamma2_sq;
  }
  if (c.profile == "block") j["gamma3_sq"] = c.gamma3_sq;
  if (c.profile == "polynomial") j["tau"] = c.tau;
  if (c.profile == "csv") j["profile_csv"] = c.profile_csv;
  if (c.profile == "mixture") {
    j["class_probs"] = c.class_probs;
    j["class_variances"] = c.class_variances;
  }
  if (c.profile == "quasi_ds" || c.profile == "mixture") j["profile_seed"] = c.profile_seed;
  j["normalize"] = c.normalize;
  if (c.test_weights.empty()) {
    j["test_profile"] = "columns";
  } else {
    j["test_profile"] = c.test_weights;
  }
  j["alpha"] = c.params.alpha;
  j["sigma"] = c.params.sigma;
  if (c.profile != "csv") j["n"] = c.n;
  if (c.p) j["p"] = *c.p;
  if (!c.ratios.empty()) j["ratios"] = c.ratios;
  if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
  j["entry_dist"] = vprisk::to_string(c.entry_dist);
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  j["mc_draws"] = c.mc_draws;
  j["d_star"] = c.d_star;
  j["emp_ridgeless_lambda"] = c.emp_ridgeless_lambda;
  j["quantities"] = c.quantities;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = resolved_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Index profile_p_multiple(const ExperimentConfig& c) {
  if (c.profile == "piecewise") return 4;
  if (c.profile == "block") return 12;
  if (fixed_dimensions(c.profile)) return 0;
  return 1;
}

VarianceProfile build_profile(const ExperimentConfig& c, Index n, Index p) {
  VarianceProfile g = [&]() -> VarianceProfile {
    if (c.profile == "constant") return make_constant(n, p, c.gamma);
    if (c.profile == "quasi_ds") return make_quasi_doubly_stochastic(n, p, c.profile_seed);
    if (c.profile == "piecewise") return make_piecewise(n, p, c.gamma1_sq, c.gamma2_sq);
    if (c.profile == "block") return make_block(n, p, c.gamma1_sq, c.gamma2_sq, c.gamma3_sq);
    if (c.profile == "alternated") return make_alternated_columns(n, p, c.gamma1_sq, c.gamma2_sq);
    if (c.profile == "polynomial") return make_polynomial(n, p, c.tau);
    if (c.profile == "csv") return load_csv(c.profile_csv);
    const Eigen::Index k = static_cast<Eigen::Index>(c.class_probs.size());
    if (static_cast<Eigen::Index>(c.class_variances.size()) != k) {
      throw InvalidArgument("class_variances needs one row per class");
    }
    Eigen::MatrixXd variances(k, p);
    for (Eigen::Index a = 0; a < k; ++a) {
      if (static_cast<Index>(c.class_variances[a].size()) != p) {
        throw InvalidArgument("class_variances rows must all have the same length");
      }
      for (Index j = 0; j < p; ++j) variances(a, j) = c.class_variances[a][j];
    }
    return make_mixture(n, Eigen::Map<const Eigen::VectorXd>(c.class_probs.data(), k), variances,
                        c.profile_seed)
        .profile;
  }();
  return c.normalize ? normalize(g) : g;
}

TestProfile build_test_profile(const ExperimentConfig& c, const VarianceProfile& profile) {
  if (c.test_weights.empty()) return test_profile_columns(profile);
  if (static_cast<Index>(c.test_weights.size()) != profile.p()) {
    throw ConfigError("test_profile has " + std::to_string(c.test_weights.size()) +
                      " weights but the profile has p=" + std::to_string(profile.p()));
  }
  return TestProfile(Eigen::Map<const Eigen::VectorXd>(c.test_weights.data(),
                                                       static_cast<Eigen::Index>(c.test_weights.size())));
}

}  // namespace vprisk::cli
