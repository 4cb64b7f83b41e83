#include "mswlab/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "mswlab/error.hpp"
#include "mswlab/rng.hpp"

namespace mswlab {

namespace {

constexpr double kWeightSumTol = 1e-12;

double sum_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
  const std::string t = trim(field);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(source + ":" + std::to_string(line) + ": not a finite number: '" + t + "'");
  }
  return value;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(PointMatrix points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("measure needs at least one atom");
  if (points_.rows() < 1) throw ValidationError("measure dimension must be positive");
  if (static_cast<std::size_t>(points_.cols()) != weights_.size()) {
    throw ValidationError("point count and weight count differ");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and nonnegative");
  }
  if (std::abs(sum_of(weights_) - 1.0) > kWeightSumTol) {
    throw ValidationError("weights must sum to 1");
  }
  if (!points_.allFinite()) throw ValidationError("points must be finite");
}

DiscreteMeasure DiscreteMeasure::normalized(PointMatrix points, std::vector<double> raw_weights) {
  for (double w : raw_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and nonnegative");
  }
  const double total = sum_of(raw_weights);
  if (!(total > 0.0)) throw ValidationError("total weight must be positive");
  for (double& w : raw_weights) w /= total;
  return DiscreteMeasure(std::move(points), std::move(raw_weights));
}

DiscreteMeasure DiscreteMeasure::uniform(PointMatrix points) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (n == 0) throw ValidationError("measure needs at least one atom");
  return DiscreteMeasure(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::dirac(const Vector& x) {
  return DiscreteMeasure(PointMatrix(x), {1.0});
}

double DiscreteMeasure::radius() const { return points_.colwise().norm().maxCoeff(); }

Vector DiscreteMeasure::mean() const {
  Vector m = Vector::Zero(dim());
  for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * point(i);
  return m;
}

Matrix DiscreteMeasure::second_moment() const {
  Matrix s = Matrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < size(); ++i) {
    s.selfadjointView<Eigen::Lower>().rankUpdate(point(i), weights_[i]);
  }
  return s.selfadjointView<Eigen::Lower>();
}

bool DiscreteMeasure::is_symmetric(double tol) const {
  // Compare, for each atom x, the total mass within tol of x and of -x.
  for (std::size_t i = 0; i < size(); ++i) {
    double at_x = 0.0;
    double at_minus_x = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      if ((point(j) - point(i)).lpNorm<Eigen::Infinity>() <= tol) at_x += weights_[j];
      if ((point(j) + point(i)).lpNorm<Eigen::Infinity>() <= tol) at_minus_x += weights_[j];
    }
    if (std::abs(at_x - at_minus_x) > tol) return false;
  }
  return true;
}

DiscreteMeasure DiscreteMeasure::transformed(const Matrix& a) const {
  if (a.cols() != dim()) throw ValidationError("transform dimension mismatch");
  return DiscreteMeasure(a * points_, weights_);
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  return DiscreteMeasure(points_ * factor, weights_);
}

DiscreteMeasure parse_csv(std::istream& in, bool has_weights, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    std::stringstream fields(t);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_number(field, source, line_no));
    if (t.back() == ',') throw ParseError(source + ":" + std::to_string(line_no) + ": trailing comma");
    if (rows.empty()) {
      arity = row.size();
      if (has_weights && arity < 2) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": weighted rows need at least 2 columns");
      }
    } else if (row.size() != arity) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                       " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(source + ": no points");

  const auto dim = static_cast<Eigen::Index>(has_weights ? arity - 1 : arity);
  PointMatrix points(dim, static_cast<Eigen::Index>(rows.size()));
  std::vector<double> weights;
  weights.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) points(k, static_cast<Eigen::Index>(i)) = rows[i][k];
    if (has_weights) {
      if (rows[i].back() < 0.0) throw ValidationError(source + ": negative weight in data row " + std::to_string(i + 1));
      weights.push_back(rows[i].back());
    } else {
      weights.push_back(1.0);
    }
  }
  return DiscreteMeasure::normalized(std::move(points), std::move(weights));
}

DiscreteMeasure from_csv(const std::filesystem::path& path, bool has_weights) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, has_weights, path.string());
}

void write_csv(std::ostream& out, const DiscreteMeasure& mu, bool with_weights) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (Eigen::Index k = 0; k < mu.dim(); ++k) {
      if (k) out << ',';
      out << mu.point(i)[k];
    }
    if (with_weights) out << ',' << mu.weight(i);
    out << '\n';
  }
}

DiscreteMeasure two_point(const Vector& y0) {
  if (y0.size() < 1 || y0.norm() == 0.0) throw ValidationError("two_point needs a nonzero vector");
  PointMatrix pts(y0.size(), 2);
  pts.col(0) = y0;
  pts.col(1) = -y0;
  return DiscreteMeasure(std::move(pts), {0.5, 0.5});
}

DiscreteMeasure scaled_basis(int d) {
  if (d < 1) throw ValidationError("scaled_basis needs d >= 1");
  const double s = std::sqrt(static_cast<double>(d));
  PointMatrix pts = PointMatrix::Zero(d, 2 * d);
  for (int j = 0; j < d; ++j) {
    pts(j, 2 * j) = s;
    pts(j, 2 * j + 1) = -s;
  }
  return DiscreteMeasure::uniform(std::move(pts));
}

DiagonalConstruction diagonal_construction(const Matrix& sigma) {
  const auto d = sigma.rows();
  if (d < 1 || sigma.cols() != d) throw ValidationError("sigma must be a nonempty square matrix");
  if (!sigma.allFinite()) throw ValidationError("sigma must be finite");
  if ((sigma - sigma.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, sigma.lpNorm<Eigen::Infinity>())) {
    throw ValidationError("sigma must be symmetric");
  }

  // Exactly diagonal input keeps the coordinate axes as eigenvectors, so the
  // atoms are bit-exact multiples of e_j.
  Vector eigenvalues(d);
  Matrix eigenvectors;
  const bool diagonal = (sigma - Matrix(sigma.diagonal().asDiagonal())).lpNorm<Eigen::Infinity>() == 0.0;
  if (diagonal) {
    eigenvalues = sigma.diagonal();
    eigenvectors = Matrix::Identity(d, d);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
  }

  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  if (eigenvalues.minCoeff() < -1e-10 * scale) throw ValidationError("sigma must be positive semidefinite");
  eigenvalues = eigenvalues.cwiseMax(0.0);
  const double trace = eigenvalues.sum();
  if (!(trace > 0.0)) throw ValidationError("sigma must be nonzero");
  const double op = eigenvalues.maxCoeff();
  if (op > 0.5 * trace * (1.0 + 1e-12)) {
    throw ValidationError("construction requires ||sigma||_op <= Tr(sigma)/2");
  }

  // Descending eigenvalues; ties keep the lower index first.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eigenvalues[a] > eigenvalues[b]; });

  const double root_t = std::sqrt(trace);
  std::vector<Vector> atoms;
  std::vector<double> weights;
  for (Eigen::Index j : order) {
    if (eigenvalues[j] <= 0.0) continue;
    const Vector u = eigenvectors.col(j).normalized();
    atoms.push_back(root_t * u);
    atoms.push_back(-root_t * u);
    weights.push_back(eigenvalues[j] / (2.0 * trace));
    weights.push_back(eigenvalues[j] / (2.0 * trace));
  }
  PointMatrix pts(d, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = atoms[i];

  DiagonalConstruction out{DiscreteMeasure::normalized(std::move(pts), std::move(weights)),
                           eigenvectors.col(order.front()).normalized(), op / trace, trace, sigma};
  return out;
}

PointMatrix sample(const DiscreteMeasure& mu, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample size must be at least 1");
  std::vector<double> cdf(mu.size());
  std::partial_sum(mu.weights().begin(), mu.weights().end(), cdf.begin());
  Rng rng(seed);
  PointMatrix out(mu.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto k = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    if (k >= mu.size()) k = mu.size() - 1;
    // Skip zero-mass atoms that share a CDF value with their successor.
    while (mu.weight(k) == 0.0 && k + 1 < mu.size()) ++k;
    out.col(static_cast<Eigen::Index>(i)) = mu.point(k);
  }
  return out;
}

DiscreteMeasure empirical(const PointMatrix& samples) {
  if (samples.cols() == 0) throw ValidationError("empirical measure needs samples");
  return DiscreteMeasure::uniform(samples);
}

DiscreteMeasure symmetrize_empirical(const PointMatrix& samples) {
  if (samples.cols() == 0) throw ValidationError("symmetrization needs samples");
  const auto n = samples.cols();
  PointMatrix pts(samples.rows(), 2 * n);
  pts.leftCols(n) = samples;
  pts.rightCols(n) = -samples;
  return DiscreteMeasure::uniform(std::move(pts));
}

DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu) {
  const auto& pts = mu.points();
  std::vector<std::size_t> order(mu.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto col = [&](std::size_t i) { return pts.col(static_cast<Eigen::Index>(i)); };
  auto less = [&](std::size_t i, std::size_t j) {
    const auto a = col(i), b = col(j);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::stable_sort(order.begin(), order.end(), less);

  std::vector<std::size_t> heads;
  std::vector<double> weights;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && col(order[k]) == col(heads.back())) {
      weights.back() += mu.weight(order[k]);
    } else {
      heads.push_back(order[k]);
      weights.push_back(mu.weight(order[k]));
    }
  }
  if (heads.size() == mu.size()) return mu;
  PointMatrix merged(mu.dim(), static_cast<Eigen::Index>(heads.size()));
  for (std::size_t k = 0; k < heads.size(); ++k) merged.col(static_cast<Eigen::Index>(k)) = col(heads[k]);
  return DiscreteMeasure(std::move(merged), std::move(weights));
}

double symmetric_op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

CovarianceSummary covariance_summary(const DiscreteMeasure& mu) {
  CovarianceSummary s;
  s.sigma = mu.second_moment();
  s.op_norm = symmetric_op_norm(s.sigma);
  s.trace = s.sigma.trace();
  s.radius = mu.radius();
  return s;
}

}  // namespace mswlab
