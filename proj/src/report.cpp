#include "mswlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace mswlab::ratelab {

namespace {

using nlohmann::json;

json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

json config_json(const RateExperimentConfig& c) {
  json measure{{"generator", c.measure.generator}};
  if (!c.measure.y0.empty()) measure["y0"] = c.measure.y0;
  if (c.measure.d) measure["d"] = c.measure.d;
  if (!c.measure.sigma.empty()) measure["sigma"] = c.measure.sigma;
  if (!c.measure.sigma_diag.empty()) measure["sigma_diag"] = c.measure.sigma_diag;
  if (!c.measure.path.empty()) {
    measure["path"] = c.measure.path;
    measure["has_weights"] = c.measure.has_weights;
  }
  json verdicts{{"lower_bound_w11", c.verdicts.lower_bound_w11},
                {"slope_tolerance", c.verdicts.slope_tolerance},
                {"constant_trend", c.verdicts.constant_trend},
                {"symmetrized_upper", c.verdicts.symmetrized_upper},
                {"symmetrized_lower", c.verdicts.symmetrized_lower},
                {"lifted_gaussian", c.verdicts.lifted_gaussian},
                {"c_cap", c.verdicts.c_cap}};
  verdicts["expected_slope"] = c.verdicts.expected_slope ? json(*c.verdicts.expected_slope) : json(nullptr);
  return json{{"version", c.version},
              {"name", c.name},
              {"estimand", to_string(c.estimand)},
              {"p", c.p},
              {"n_grid", c.n_grid},
              {"trials", c.trials},
              {"base_seed", c.base_seed},
              {"measure", measure},
              {"solver",
               {{"method", c.solver.kind == SolverKind::grid ? "grid" : "pga"},
                {"tol", c.solver.tol},
                {"restarts", c.solver.restarts}}},
              {"verdicts", verdicts}};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fmt_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string config_hash(const RateExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string report_json(const RateReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"n", r.n},
                        {"mean", number(r.mean)},
                        {"std_error", number(r.std_error)},
                        {"trials", r.trials},
                        {"failed", r.failed},
                        {"bound_rhs", number(r.bound_rhs)},
                        {"verdict", r.verdict}});
  }
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back(json{{"name", v.name},
                            {"bound", v.bound},
                            {"lhs", number(v.lhs)},
                            {"rhs", number(v.rhs)},
                            {"margin_in_ses", number(v.margin_in_ses)},
                            {"pass", v.pass},
                            {"detail", v.detail}});
  }
  json doc{{"schema", "mswlab.rate_report/1"},
           {"config", config_json(report.config)},
           {"seed", report.config.base_seed},
           {"config_hash", config_hash(report.config)},
           {"rows", rows},
           {"slope", number(report.slope)},
           {"slope_residual", number(report.slope_residual)},
           {"failed_trials", report.failed_trials},
           {"verdicts", verdicts},
           {"all_pass", report.all_pass()}};
  return doc.dump(2) + "\n";
}

void write_report_csv(std::ostream& out, const RateReport& report) {
  out << "n,mean,std_error,trials,bound_rhs,verdict\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << fmt(r.mean) << ',' << fmt(r.std_error) << ',' << r.trials << ','
        << (std::isfinite(r.bound_rhs) ? fmt(r.bound_rhs) : std::string("nan")) << ',' << r.verdict << '\n';
  }
}

std::string render_svg(const RateReport& report) {
  constexpr double kW = 800, kH = 600, kLeft = 90, kRight = 30, kTop = 40, kBottom = 70;

  struct Series {
    std::string name, color;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  Series data{"mean", "#1f77b4", {}};
  for (const auto& r : report.rows) {
    if (r.mean > 0) data.pts.emplace_back(static_cast<double>(r.n), r.mean);
  }
  series.push_back(data);
  if (std::isfinite(report.slope)) {
    const SlopeFit fit = fit_loglog(report.rows);
    Series line{"fit", "#d62728", {}};
    for (const auto& r : report.rows) {
      const auto n = static_cast<double>(r.n);
      line.pts.emplace_back(n, std::exp(fit.intercept + fit.slope * std::log(n)));
    }
    series.push_back(line);
  }
  Series bound{"bound", "#2ca02c", {}};
  for (const auto& r : report.rows) {
    if (std::isfinite(r.bound_rhs) && r.bound_rhs > 0) bound.pts.emplace_back(static_cast<double>(r.n), r.bound_rhs);
  }
  if (!bound.pts.empty()) series.push_back(bound);

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);

  auto px = [&](double x) { return kLeft + (std::log10(x) - xmin) / (xmax - xmin) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (std::log10(y) - ymin) / (ymax - ymin) * (kH - kTop - kBottom); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
    << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\"" << kH - kBottom
    << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom << "\"/>\n";
  for (double e = xmin; e <= xmax; e += 1) {
    const double x = px(std::pow(10.0, e));
    o << "<line x1=\"" << fmt_short(x) << "\" y1=\"" << kH - kBottom << "\" x2=\"" << fmt_short(x) << "\" y2=\""
      << kH - kBottom + 6 << "\"/>\n";
  }
  for (double e = ymin; e <= ymax; e += 1) {
    const double y = py(std::pow(10.0, e));
    o << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << fmt_short(y) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt_short(y)
      << "\"/>\n";
  }
  o << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double e = xmin; e <= xmax; e += 1) {
    o << "<text x=\"" << fmt_short(px(std::pow(10.0, e))) << "\" y=\"" << kH - kBottom + 22
      << "\" text-anchor=\"middle\">1e" << static_cast<int>(e) << "</text>\n";
  }
  for (double e = ymin; e <= ymax; e += 1) {
    o << "<text x=\"" << kLeft - 10 << "\" y=\"" << fmt_short(py(std::pow(10.0, e)) + 4)
      << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
  }
  o << "<text x=\"" << (kW + kLeft - kRight) / 2 << "\" y=\"" << kH - 20 << "\" text-anchor=\"middle\">n</text>\n"
    << "<text x=\"" << kLeft << "\" y=\"24\">" << xml_escape(report.config.name) << ": " << to_string(report.config.estimand)
    << "</text>\n";
  double ly = kTop + 10;
  for (const auto& s : series) {
    o << "<text x=\"" << kW - kRight - 120 << "\" y=\"" << ly << "\" fill=\"" << s.color << "\">" << s.name
      << "</text>\n";
    ly += 16;
  }
  o << "</g>\n";
  for (const auto& s : series) {
    o << "<polyline class=\"" << s.name << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.pts.size(); ++k) {
      o << (k ? " " : "") << fmt_short(px(s.pts[k].first)) << ',' << fmt_short(py(s.pts[k].second));
    }
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mswlab::ratelab
