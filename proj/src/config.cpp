#include "mswlab/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mswlab/error.hpp"

namespace mswlab::ratelab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"name", "estimand", "p", "n_grid", "trials", "base_seed"}},
      {"measure", {"generator", "y0", "d", "sigma", "sigma_diag", "path", "has_weights"}},
      {"solver", {"method", "tol", "restarts"}},
      {"verdicts",
       {"lower_bound_w11", "expected_slope", "slope_tolerance", "constant_trend", "symmetrized_upper",
        "symmetrized_lower", "lifted_gaussian", "c_cap"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': not a finite number: '" + text + "'");
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': not an integer: '" + text + "'");
  }
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ParseError("key '" + key + "': expected true or false, got '" + text + "'");
}

std::string list_text(const std::vector<double>& xs) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t k = 0; k < xs.size(); ++k) out << (k ? ", " : "") << xs[k];
  return out.str();
}

std::string number_text(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace

std::string to_string(Estimand e) {
  switch (e) {
    case Estimand::ew11: return "EW11";
    case Estimand::ewp1: return "EWp1";
    case Estimand::ew21_sq_symmetrized: return "EW21_sq_symmetrized";
    case Estimand::e_rademacher_sum_norm: return "E_rademacher_sum_norm";
    case Estimand::e_gaussian_sum_norm: return "E_gaussian_sum_norm";
    case Estimand::e_gaussian_lifted_opnorm: return "E_gaussian_lifted_opnorm";
    case Estimand::e_witness_sq: return "E_witness_sq";
  }
  return "?";
}

Estimand parse_estimand(const std::string& name) {
  for (Estimand e : {Estimand::ew11, Estimand::ewp1, Estimand::ew21_sq_symmetrized, Estimand::e_rademacher_sum_norm,
                     Estimand::e_gaussian_sum_norm, Estimand::e_gaussian_lifted_opnorm, Estimand::e_witness_sq}) {
    if (to_string(e) == trim(name)) return e;
  }
  throw ParseError("unknown estimand '" + name + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (trim(field).empty()) throw ParseError("empty entry in list '" + text + "'");
    out.push_back(to_double("list", field));
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

Matrix sigma_from_list(const std::vector<double>& values, bool full) {
  const auto k = static_cast<Eigen::Index>(values.size());
  if (!full) {
    Matrix m = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
    return m;
  }
  const auto root = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(k))));
  if (root * root != k) throw ValidationError("sigma needs d*d entries (got " + std::to_string(k) + ")");
  Matrix m(root, root);
  for (Eigen::Index i = 0; i < root; ++i) {
    for (Eigen::Index j = 0; j < root; ++j) m(i, j) = values[static_cast<std::size_t>(i * root + j)];
  }
  return m;
}

void RateExperimentConfig::validate() const {
  if (version != 1) throw ValidationError("unsupported config version " + std::to_string(version));
  if (n_grid.empty()) throw ValidationError("n_grid must not be empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw ValidationError("n_grid entries must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw ValidationError("n_grid must be strictly increasing");
  }
  if (trials < 2) throw ValidationError("trials must be >= 2");
  if (!(p >= 1.0)) throw ValidationError("p must be >= 1");
  if (solver.kind == SolverKind::grid && !(solver.tol > 0.0)) throw ValidationError("solver tol must be positive");
  if (solver.restarts < 1) throw ValidationError("solver restarts must be >= 1");
  const bool uses_log_n = verdicts.symmetrized_upper || verdicts.lifted_gaussian;
  if (uses_log_n && n_grid.front() < 2) {
    throw ValidationError("n_grid must start at n >= 2 for bounds involving ln n");
  }
  if (verdicts.lower_bound_w11 && estimand != Estimand::ew11) {
    throw ValidationError("lower_bound_w11 verdict requires estimand EW11");
  }
  if (verdicts.symmetrized_upper && estimand != Estimand::ew21_sq_symmetrized) {
    throw ValidationError("symmetrized_upper verdict requires estimand EW21_sq_symmetrized");
  }
  if (verdicts.symmetrized_lower && estimand != Estimand::ew21_sq_symmetrized && estimand != Estimand::e_witness_sq) {
    throw ValidationError("symmetrized_lower verdict requires estimand EW21_sq_symmetrized or E_witness_sq");
  }
  if (verdicts.lifted_gaussian && estimand != Estimand::e_gaussian_lifted_opnorm) {
    throw ValidationError("lifted_gaussian verdict requires estimand E_gaussian_lifted_opnorm");
  }
  if (!(verdicts.c_cap > 0.0)) throw ValidationError("c_cap must be positive");
  if (!(verdicts.slope_tolerance > 0.0)) throw ValidationError("slope_tolerance must be positive");
}

RateExperimentConfig parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  std::vector<std::string> unknown;
  bool has_version = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (section == "version") {
        has_version = true;
      } else {
        unknown.push_back(section);
      }
      continue;
    }
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      unknown.push_back("[" + section + "]");
      continue;
    }
    for (const auto& [key, _] : body) {
      if (!it->second.count(key)) unknown.push_back(section + "." + key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = source + ": unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ParseError(msg);
  }
  if (!has_version) throw ParseError(source + ": missing 'version'");

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  auto require = [&](const std::string& path) {
    auto v = get(path);
    if (!v) throw ParseError(source + ": missing required key '" + path + "'");
    return *v;
  };

  RateExperimentConfig c;
  c.version = static_cast<int>(to_integer("version", require("version")));
  if (auto v = get("experiment.name")) c.name = *v;
  c.estimand = parse_estimand(require("experiment.estimand"));
  if (auto v = get("experiment.p")) c.p = to_double("experiment.p", *v);
  for (double x : parse_number_list(require("experiment.n_grid"))) {
    if (x != std::floor(x)) throw ParseError(source + ": n_grid entries must be integers");
    c.n_grid.push_back(static_cast<long long>(x));
  }
  c.trials = static_cast<int>(to_integer("experiment.trials", require("experiment.trials")));
  {
    const std::string seed = require("experiment.base_seed");
    try {
      std::size_t used = 0;
      c.base_seed = std::stoull(seed, &used, 0);
      if (used != seed.size()) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw ParseError(source + ": base_seed is not an unsigned 64-bit integer");
    }
  }

  c.measure.generator = require("measure.generator");
  if (auto v = get("measure.y0")) c.measure.y0 = parse_number_list(*v);
  if (auto v = get("measure.d")) c.measure.d = static_cast<int>(to_integer("measure.d", *v));
  if (auto v = get("measure.sigma")) c.measure.sigma = parse_number_list(*v);
  if (auto v = get("measure.sigma_diag")) c.measure.sigma_diag = parse_number_list(*v);
  if (auto v = get("measure.path")) c.measure.path = *v;
  if (auto v = get("measure.has_weights")) c.measure.has_weights = to_bool("measure.has_weights", *v);

  if (auto v = get("solver.method")) {
    if (*v == "grid") {
      c.solver.kind = SolverKind::grid;
    } else if (*v == "pga") {
      c.solver.kind = SolverKind::pga;
    } else {
      throw ParseError(source + ": solver.method must be grid or pga");
    }
  }
  if (auto v = get("solver.tol")) c.solver.tol = to_double("solver.tol", *v);
  if (auto v = get("solver.restarts")) c.solver.restarts = static_cast<int>(to_integer("solver.restarts", *v));

  if (auto v = get("verdicts.lower_bound_w11")) c.verdicts.lower_bound_w11 = to_bool("lower_bound_w11", *v);
  if (auto v = get("verdicts.expected_slope")) c.verdicts.expected_slope = to_double("expected_slope", *v);
  if (auto v = get("verdicts.slope_tolerance")) c.verdicts.slope_tolerance = to_double("slope_tolerance", *v);
  if (auto v = get("verdicts.constant_trend")) c.verdicts.constant_trend = to_bool("constant_trend", *v);
  if (auto v = get("verdicts.symmetrized_upper")) c.verdicts.symmetrized_upper = to_bool("symmetrized_upper", *v);
  if (auto v = get("verdicts.symmetrized_lower")) c.verdicts.symmetrized_lower = to_bool("symmetrized_lower", *v);
  if (auto v = get("verdicts.lifted_gaussian")) c.verdicts.lifted_gaussian = to_bool("lifted_gaussian", *v);
  if (auto v = get("verdicts.c_cap")) c.verdicts.c_cap = to_double("c_cap", *v);

  c.validate();
  return c;
}

RateExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

std::string canonical_config(const RateExperimentConfig& c) {
  std::ostringstream out;
  out << "version = " << c.version << "\n\n[experiment]\n";
  out << "name = " << c.name << "\n";
  out << "estimand = " << to_string(c.estimand) << "\n";
  out << "p = " << number_text(c.p) << "\n";
  out << "n_grid = ";
  for (std::size_t k = 0; k < c.n_grid.size(); ++k) out << (k ? ", " : "") << c.n_grid[k];
  out << "\ntrials = " << c.trials << "\n";
  out << "base_seed = " << c.base_seed << "\n\n[measure]\n";
  out << "generator = " << c.measure.generator << "\n";
  if (!c.measure.y0.empty()) out << "y0 = " << list_text(c.measure.y0) << "\n";
  if (c.measure.d) out << "d = " << c.measure.d << "\n";
  if (!c.measure.sigma.empty()) out << "sigma = " << list_text(c.measure.sigma) << "\n";
  if (!c.measure.sigma_diag.empty()) out << "sigma_diag = " << list_text(c.measure.sigma_diag) << "\n";
  if (!c.measure.path.empty()) out << "path = " << c.measure.path << "\nhas_weights = " << (c.measure.has_weights ? "true" : "false") << "\n";
  out << "\n[solver]\nmethod = " << (c.solver.kind == SolverKind::grid ? "grid" : "pga") << "\n";
  out << "tol = " << number_text(c.solver.tol) << "\nrestarts = " << c.solver.restarts << "\n\n[verdicts]\n";
  const auto& v = c.verdicts;
  out << "lower_bound_w11 = " << (v.lower_bound_w11 ? "true" : "false") << "\n";
  if (v.expected_slope) out << "expected_slope = " << number_text(*v.expected_slope) << "\n";
  out << "slope_tolerance = " << number_text(v.slope_tolerance) << "\n";
  out << "constant_trend = " << (v.constant_trend ? "true" : "false") << "\n";
  out << "symmetrized_upper = " << (v.symmetrized_upper ? "true" : "false") << "\n";
  out << "symmetrized_lower = " << (v.symmetrized_lower ? "true" : "false") << "\n";
  out << "lifted_gaussian = " << (v.lifted_gaussian ? "true" : "false") << "\n";
  out << "c_cap = " << number_text(v.c_cap) << "\n";
  return out.str();
}

ExperimentMeasure build_measure(const MeasureSpec& spec) {
  auto finish = [](DiscreteMeasure mu, std::optional<DiagonalConstruction> diag) {
    CovarianceSummary summary = covariance_summary(mu);
    return ExperimentMeasure{std::move(mu), std::move(diag), std::move(summary)};
  };
  if (spec.generator == "two_point") {
    if (spec.y0.empty()) throw ValidationError("two_point needs y0");
    return finish(two_point(Eigen::Map<const Vector>(spec.y0.data(), static_cast<Eigen::Index>(spec.y0.size()))),
                  std::nullopt);
  }
  if (spec.generator == "scaled_basis") return finish(scaled_basis(spec.d), std::nullopt);
  if (spec.generator == "diagonal") {
    if (spec.sigma.empty() == spec.sigma_diag.empty()) {
      throw ValidationError("diagonal needs exactly one of sigma or sigma_diag");
    }
    auto construction = diagonal_construction(spec.sigma.empty() ? sigma_from_list(spec.sigma_diag, false)
                                                                  : sigma_from_list(spec.sigma, true));
    DiscreteMeasure mu = construction.measure;
    return finish(std::move(mu), std::move(construction));
  }
  if (spec.generator == "csv") {
    if (spec.path.empty()) throw ValidationError("csv generator needs path");
    return finish(from_csv(spec.path, spec.has_weights), std::nullopt);
  }
  throw ValidationError("unknown measure generator '" + spec.generator + "'");
}

}  // namespace mswlab::ratelab
