#include "mswlab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "mswlab/chaining.hpp"
#include "mswlab/config.hpp"
#include "mswlab/error.hpp"
#include "mswlab/ratelab.hpp"
#include "mswlab/report.hpp"
#include "mswlab/sliced.hpp"
#include "mswlab/symlift.hpp"

namespace mswlab {

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kValidation = 1, kExperiment = 2, kIo = 3 };

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

std::string g17(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

struct DistArgs {
  std::string mu, nu, method = "grid", out;
  bool mu_weights = false, nu_weights = false;
  double p = 1.0, tol = 1e-4;
  int restarts = 16;
  std::uint64_t seed = 0;
};

int run_dist(const DistArgs& a, std::ostream& out) {
  const DiscreteMeasure mu = from_csv(a.mu, a.mu_weights);
  const DiscreteMeasure nu = from_csv(a.nu, a.nu_weights);
  if (mu.dim() != nu.dim()) throw ValidationError("--mu and --nu have different dimensions");
  if (!(a.p >= 1.0)) throw ValidationError("--p must be >= 1");

  std::optional<CertifiedValue> result;
  if (a.method == "grid") {
    if (mu.dim() > 3) {
      throw ValidationError("--method grid requires dimension <= 3 (inputs have dimension " +
                            std::to_string(mu.dim()) + "); use --method pga");
    }
    result = max_sliced_grid(mu, nu, a.p, a.tol);
  } else {
    PgaOptions options;
    options.restarts = a.restarts;
    options.seed = a.seed;
    result = max_sliced_pga(mu, nu, a.p, options);
  }

  const Vector dir = result->argmax[0];
  std::string argmax;
  for (Eigen::Index k = 0; k < dir.size(); ++k) argmax += (k ? "," : "") + g17(dir[k]);
  out << "value " << g17(result->value) << "\n";
  out << "gap " << (result->certified() ? g17(result->gap) : std::string("inf")) << "\n";
  out << "argmax " << argmax << "\n";

  if (!a.out.empty()) {
    nlohmann::json doc{{"method", a.method},
                       {"p", a.p},
                       {"tol", a.tol},
                       {"restarts", a.restarts},
                       {"seed", a.seed},
                       {"mu", a.mu},
                       {"nu", a.nu},
                       {"value", result->value},
                       {"argmax", std::vector<double>(dir.data(), dir.data() + dir.size())}};
    doc["gap"] = result->certified() ? nlohmann::json(result->gap) : nlohmann::json(nullptr);
    write_file(a.out, doc.dump(2) + "\n");
  }
  return kOk;
}

struct RatesArgs {
  std::string config, out, csv, svg;
};

int run_rates(const RatesArgs& a, std::ostream& out) {
  const auto config = ratelab::load_config(a.config);
  const auto report = ratelab::run_experiment(config);
  write_file(a.out, ratelab::report_json(report));
  if (!a.csv.empty()) {
    std::ostringstream csv;
    ratelab::write_report_csv(csv, report);
    write_file(a.csv, csv.str());
  }
  if (!a.svg.empty()) write_file(a.svg, ratelab::render_svg(report));

  out << "experiment " << config.name << " (" << ratelab::config_hash(config) << ", seed " << config.base_seed
      << ")\n";
  ratelab::write_report_csv(out, report);
  out << "slope " << g17(report.slope) << "\n";
  for (const auto& v : report.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << v.name << ": lhs " << g17(v.lhs) << " rhs " << g17(v.rhs) << " ("
        << v.detail << ")\n";
  }
  return report.all_pass() ? kOk : kExperiment;
}

struct LowerBoundArgs {
  std::string construction, params;
  bool full_sigma = false;
  long long n = 1;
  std::uint64_t seed = 0;
};

int run_lower_bound(const LowerBoundArgs& a, std::ostream& out) {
  ratelab::MeasureSpec spec;
  const auto params = ratelab::parse_number_list(a.params);
  if (a.construction == "two-point") {
    spec.generator = "two_point";
    spec.y0 = params;
  } else if (a.construction == "scaled-basis") {
    if (params.size() != 1 || params[0] != std::floor(params[0])) {
      throw ValidationError("scaled-basis takes one integer parameter d");
    }
    spec.generator = "scaled_basis";
    spec.d = static_cast<int>(params[0]);
  } else {
    spec.generator = "diagonal";
    (a.full_sigma ? spec.sigma : spec.sigma_diag) = params;
  }
  if (a.n < 1) throw ValidationError("--n must be >= 1");
  const auto measure = ratelab::build_measure(spec);
  const PointMatrix x = sample(measure.mu, static_cast<std::size_t>(a.n), a.seed);

  out << "witness_covariance " << g17(witness_covariance(x, measure.summary.op_norm)) << "\n";
  if (measure.diagonal) out << "witness_binomial " << g17(witness_binomial(x, *measure.diagonal)) << "\n";
  out << "lower_bound_rhs " << g17(ratelab::symmetrized_lower_rhs(measure.summary, a.n)) << "\n";
  return kOk;
}

struct CoverArgs {
  double a = 1.0, value_step = 0.25, delta = 1.0;
  int m = 9;
  std::string metric = "sup", eps = "0.25,0.5,1.0", out;
};

int run_cover(const CoverArgs& a, std::ostream& out) {
  chaining::FunctionMetric metric;
  metric.kind = a.metric == "sup" ? chaining::MetricKind::sup : chaining::MetricKind::delta;
  metric.delta = a.delta;
  std::ostringstream csv;
  csv << "epsilon,cover_count,pack_count,log_cover\n";
  for (double eps : ratelab::parse_number_list(a.eps)) {
    const auto e = chaining::cover_count(a.a, a.m, a.value_step, metric, eps);
    csv << g17(e.epsilon) << ',' << e.cover_count << ',' << e.pack_count << ','
        << g17(std::log(static_cast<double>(e.cover_count))) << '\n';
  }
  if (!a.out.empty()) write_file(a.out, csv.str());
  out << csv.str();
  return kOk;
}

void apply_thread_override() {
  if (const char* env = std::getenv("MSWLAB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ValidationError("MSWLAB_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(n));
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sliced and max-sliced Wasserstein distances and Monte Carlo rate experiments", "mswlab"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Max-sliced W_p between two CSV point clouds");
  dist_cmd->add_option("--mu", dist.mu, "CSV file of the first measure")->required();
  dist_cmd->add_option("--nu", dist.nu, "CSV file of the second measure")->required();
  dist_cmd->add_flag("--mu-weights", dist.mu_weights, "last column of --mu holds weights");
  dist_cmd->add_flag("--nu-weights", dist.nu_weights, "last column of --nu holds weights");
  dist_cmd->add_option("--p", dist.p, "order p >= 1");
  dist_cmd->add_option("--method", dist.method, "grid (certified, d <= 3) or pga")
      ->check(CLI::IsMember({"grid", "pga"}));
  dist_cmd->add_option("--tol", dist.tol, "certificate tolerance for grid")->check(CLI::PositiveNumber);
  dist_cmd->add_option("--restarts", dist.restarts, "random restarts for pga")->check(CLI::PositiveNumber);
  dist_cmd->add_option("--seed", dist.seed, "seed for pga restarts");
  dist_cmd->add_option("--out", dist.out, "write the result as JSON");

  RatesArgs rates;
  auto* rates_cmd = app.add_subcommand("rates", "Run a Monte Carlo rate experiment");
  rates_cmd->add_option("--config", rates.config, "experiment config file")->required();
  rates_cmd->add_option("--out", rates.out, "JSON report path")->required();
  rates_cmd->add_option("--csv", rates.csv, "CSV report path");
  rates_cmd->add_option("--svg", rates.svg, "SVG plot path");

  LowerBoundArgs lb;
  auto* lb_cmd = app.add_subcommand("lower-bound", "Sample a construction once and print its witnesses");
  lb_cmd->add_option("--construction", lb.construction, "two-point, diagonal or scaled-basis")
      ->required()
      ->check(CLI::IsMember({"two-point", "diagonal", "scaled-basis"}));
  lb_cmd->add_option("--params", lb.params, "y0 coordinates, diagonal of Sigma, or d")->required();
  lb_cmd->add_flag("--full-sigma", lb.full_sigma, "--params holds all d*d entries of Sigma, row-major");
  lb_cmd->add_option("--n", lb.n, "sample size")->required();
  lb_cmd->add_option("--seed", lb.seed, "sampling seed");

  CoverArgs cover;
  auto* cover_cmd = app.add_subcommand("cover", "Covering and packing numbers of the 1-Lipschitz grid class");
  cover_cmd->add_option("--a", cover.a, "half width of the grid")->check(CLI::PositiveNumber);
  cover_cmd->add_option("--m", cover.m, "grid points (odd, >= 3)");
  cover_cmd->add_option("--value-step", cover.value_step, "value quantum of the class")->check(CLI::PositiveNumber);
  cover_cmd->add_option("--metric", cover.metric, "sup or delta")->check(CLI::IsMember({"sup", "delta"}));
  cover_cmd->add_option("--delta", cover.delta, "delta of the weighted norm");
  cover_cmd->add_option("--eps", cover.eps, "comma-separated radii");
  cover_cmd->add_option("--out", cover.out, "also write the CSV here");

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    apply_thread_override();
    if (*dist_cmd) return run_dist(dist, out);
    if (*rates_cmd) return run_rates(rates, out);
    if (*lb_cmd) return run_lower_bound(lb, out);
    if (*cover_cmd) return run_cover(cover, out);
    out << "mswlab " << kVersion << "\n";
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExperiment;
  }
}

}  // namespace mswlab
