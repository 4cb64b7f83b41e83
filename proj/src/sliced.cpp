#include "mswlab/sliced.hpp"

#include <algorithm>
#include <cmath>

#include "mswlab/error.hpp"
#include "mswlab/rng.hpp"
#include "mswlab/sphere_search.hpp"
#include "mswlab/transport.hpp"

namespace mswlab {

namespace {

constexpr std::size_t kExactTransportLimit = 64;
constexpr std::uint64_t kRidgeFamilySeed = 0x5EEDF00DCAFEBABEULL;
constexpr int kRidgeFamilySize = 32;
constexpr std::size_t kUpperBoundAtomLimit = 256;

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw ValidationError("measures live in different dimensions");
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite real >= 1");
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct SliceWorkspace {
  std::vector<double> a;
  std::vector<double> b;
  QuantileWorkspace q;
};

// v -> W_p^p between pushforwards, with the gradient taken through the
// monotone coupling held fixed at v.
class SliceObjective {
 public:
  SliceObjective(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, SliceKind kind)
      : mu_(mu), nu_(nu), p_(p), kind_(kind) {}

  double cost(const Vector& v, SliceWorkspace& ws, bool keep_coupling) const {
    push(mu_, v, ws.a);
    push(nu_, v, ws.b);
    return transport_cost_1d(ws.a, mu_.weights(), ws.b, nu_.weights(), p_, ws.q, keep_coupling);
  }

  double value(double cost) const { return p_ == 1.0 ? cost : std::pow(std::max(cost, 0.0), 1.0 / p_); }

  // Requires ws to hold the coupling from cost(v, ws, true).
  Vector gradient(const Vector& v, const SliceWorkspace& ws) const {
    Vector g = Vector::Zero(v.size());
    for (const auto& cell : ws.q.coupling) {
      const double delta = ws.a[cell.i] - ws.b[cell.j];
      double factor = cell.mass * sign_of(delta);
      if (factor == 0.0) continue;  // tie: zero subgradient
      if (p_ != 1.0) factor *= p_ * std::pow(std::abs(delta), p_ - 1.0);
      const auto x = mu_.point(cell.i);
      const auto y = nu_.point(cell.j);
      if (kind_ == SliceKind::linear) {
        g.noalias() += factor * (x - y);
      } else {
        g.noalias() += (2.0 * factor * x.dot(v)) * x - (2.0 * factor * y.dot(v)) * y;
      }
    }
    return g;
  }

 private:
  void push(const DiscreteMeasure& m, const Vector& v, std::vector<double>& out) const {
    out.resize(m.size());
    Eigen::Map<Eigen::VectorXd> dst(out.data(), static_cast<Eigen::Index>(out.size()));
    dst.noalias() = m.points().transpose() * v;
    if (kind_ == SliceKind::squared) dst = dst.array().square();
  }

  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  double p_;
  SliceKind kind_;
};

struct AscentResult {
  double cost;
  Vector v;
};

AscentResult ascend_on_sphere(const SliceObjective& obj, Vector v, const PgaOptions& opt, SliceWorkspace& ws) {
  v.normalize();
  double cost = obj.cost(v, ws, true);
  double step = opt.initial_step;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Vector g = obj.gradient(v, ws);
    g -= g.dot(v) * v;  // tangent component
    const double gnorm = g.norm();
    if (!(gnorm > 1e-14)) break;
    g /= gnorm;

    bool accepted = false;
    Vector candidate;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      candidate = (v + step * g).normalized();
      const double c = obj.cost(candidate, ws, false);
      if (c > cost) {
        cost = c;
        accepted = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!accepted) break;
    const double moved = (candidate - v).norm();
    v = candidate;
    obj.cost(v, ws, true);  // refresh the coupling at the new point
    step = std::min(opt.initial_step, 2.0 * step);
    if (moved < opt.move_tol) break;
  }
  return {cost, v};
}

Vector top_moment_difference_direction(const DiscreteMeasure& mu, const DiscreteMeasure& nu, bool* found) {
  const Matrix diff = mu.second_moment() - nu.second_moment();
  *found = diff.lpNorm<Eigen::Infinity>() > 1e-14;
  if (!*found) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff);
  Eigen::Index k = 0;
  solver.eigenvalues().cwiseAbs().maxCoeff(&k);
  return solver.eigenvectors().col(k);
}

// Ball projection for frame vectors.
Vector into_ball(Vector v) {
  const double n = v.norm();
  if (n > 1.0) v /= n;
  return v;
}

struct FrameEval {
  double value = 0.0;
  std::vector<Vector> grads;
};

// W_1 between s-dimensional pushforwards, optionally with its gradient in
// each frame vector (transport plan held fixed).
FrameEval evaluate_frame(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const std::vector<Vector>& frame,
                         bool with_gradient) {
  const auto s = static_cast<Eigen::Index>(frame.size());
  Matrix v(mu.dim(), s);
  for (Eigen::Index k = 0; k < s; ++k) v.col(k) = frame[static_cast<std::size_t>(k)];
  const Matrix qa = v.transpose() * mu.points();
  const Matrix qb = v.transpose() * nu.points();

  FrameEval out;
  if (with_gradient) out.grads.assign(frame.size(), Vector::Zero(mu.dim()));

  if (mu.size() <= kExactTransportLimit && nu.size() <= kExactTransportLimit) {
    Matrix cost(qa.cols(), qb.cols());
    for (Eigen::Index i = 0; i < qa.cols(); ++i) {
      for (Eigen::Index j = 0; j < qb.cols(); ++j) cost(i, j) = (qa.col(i) - qb.col(j)).norm();
    }
    const auto sol = solve_transport(mu.weights(), nu.weights(), cost);
    out.value = sol.cost;
    if (with_gradient) {
      for (const auto& e : sol.plan) {
        const auto i = static_cast<Eigen::Index>(e.source);
        const auto j = static_cast<Eigen::Index>(e.target);
        const double len = cost(i, j);
        if (len <= 0.0) continue;
        const Vector diff = mu.point(e.source) - nu.point(e.target);
        for (Eigen::Index k = 0; k < s; ++k) {
          out.grads[static_cast<std::size_t>(k)] += (e.mass * (qa(k, i) - qb(k, j)) / len) * diff;
        }
      }
    }
    return out;
  }

  // Ridge lower bound: W_1(Q#mu, Q#nu) >= W_1(<w, Q.>#mu, <w, Q.>#nu) for unit w.
  Rng rng(kRidgeFamilySeed);
  std::vector<Vector> family;
  for (Eigen::Index k = 0; k < s; ++k) family.push_back(Vector::Unit(s, k));
  for (int k = 0; k < kRidgeFamilySize; ++k) family.push_back(rng.unit_vector(s));

  QuantileWorkspace ws;
  std::vector<double> a(static_cast<std::size_t>(qa.cols()));
  std::vector<double> b(static_cast<std::size_t>(qb.cols()));
  double best = -1.0;
  Vector best_w;
  std::vector<CouplingCell> best_coupling;
  for (const Vector& w : family) {
    Eigen::Map<Eigen::VectorXd>(a.data(), qa.cols()) = qa.transpose() * w;
    Eigen::Map<Eigen::VectorXd>(b.data(), qb.cols()) = qb.transpose() * w;
    const double c = transport_cost_1d(a, mu.weights(), b, nu.weights(), 1.0, ws, with_gradient);
    if (c > best) {
      best = c;
      best_w = w;
      if (with_gradient) best_coupling = ws.coupling;
    }
  }
  out.value = best;
  if (with_gradient) {
    for (const auto& cell : best_coupling) {
      const auto i = static_cast<Eigen::Index>(cell.i);
      const auto j = static_cast<Eigen::Index>(cell.j);
      const double proj = best_w.dot(qa.col(i) - qb.col(j));
      const double sg = sign_of(proj);
      if (sg == 0.0) continue;
      const Vector diff = mu.point(cell.i) - nu.point(cell.j);
      for (Eigen::Index k = 0; k < s; ++k) out.grads[static_cast<std::size_t>(k)] += (cell.mass * sg * best_w[k]) * diff;
    }
  }
  return out;
}

struct FrameAscent {
  double value;
  std::vector<Vector> frame;
};

FrameAscent ascend_frame(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::vector<Vector> frame,
                         const PgaOptions& opt) {
  constexpr int kMaxSweeps = 200;
  double value = evaluate_frame(mu, nu, frame, false).value;
  std::vector<double> steps(frame.size(), opt.initial_step);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool moved_any = false;
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const FrameEval here = evaluate_frame(mu, nu, frame, true);
      value = here.value;
      const Vector& g = here.grads[k];
      const double gnorm = g.norm();
      if (!(gnorm > 1e-14)) continue;
      double step = steps[k];
      for (int bt = 0; bt < opt.max_backtracks; ++bt) {
        std::vector<Vector> candidate = frame;
        candidate[k] = into_ball(frame[k] + (step / gnorm) * g);
        const double c = evaluate_frame(mu, nu, candidate, false).value;
        if (c > value) {
          if ((candidate[k] - frame[k]).norm() >= opt.move_tol) moved_any = true;
          frame = std::move(candidate);
          value = c;
          steps[k] = std::min(opt.initial_step, 2.0 * step);
          break;
        }
        step *= opt.backtrack;
      }
    }
    if (!moved_any) break;
  }
  return {evaluate_frame(mu, nu, frame, false).value, frame};
}

}  // namespace

Direction::Direction(Vector v) : v_(std::move(v)) {
  if (v_.size() < 1 || std::abs(v_.norm() - 1.0) > 1e-12) throw ValidationError("direction must be a unit vector");
}

Direction Direction::normalized(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("cannot normalise a zero vector");
  return Direction(v / n);
}

Frame::Frame(std::vector<Vector> vs) : vs_(std::move(vs)) {
  if (vs_.empty()) throw ValidationError("frame needs at least one vector");
  const auto d = vs_.front().size();
  if (d < 1) throw ValidationError("frame vectors must be nonempty");
  if (static_cast<Eigen::Index>(vs_.size()) > d) throw ValidationError("frame size s must not exceed the dimension");
  for (const auto& v : vs_) {
    if (v.size() != d) throw ValidationError("frame vectors differ in dimension");
    if (v.norm() > 1.0 + 1e-12) throw ValidationError("frame vectors must lie in the unit ball");
  }
}

Matrix Frame::matrix() const {
  Matrix m(dim(), static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k) m.col(static_cast<Eigen::Index>(k)) = vs_[k];
  return m;
}

Measure1D project(const DiscreteMeasure& mu, const Direction& v) {
  if (v.dim() != mu.dim()) throw ValidationError("direction and measure dimensions differ");
  const Vector proj = mu.points().transpose() * v.vector();
  return Measure1D(std::span<const double>(proj.data(), static_cast<std::size_t>(proj.size())), mu.weights());
}

double sliced_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Vector& v, double p, SliceKind kind) {
  check_pair(mu, nu);
  check_p(p);
  if (v.size() != mu.dim()) throw ValidationError("direction and measure dimensions differ");
  SliceObjective obj(mu, nu, p, kind);
  SliceWorkspace ws;
  return obj.value(obj.cost(v, ws, false));
}

double direction_lipschitz(const DiscreteMeasure& mu, const DiscreteMeasure& nu, SliceKind kind) {
  const double ra = mu.radius();
  const double rb = nu.radius();
  return kind == SliceKind::linear ? ra + rb : 2.0 * (ra * ra + rb * rb);
}

double sliced_upper_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, SliceKind kind) {
  check_pair(mu, nu);
  check_p(p);
  if (kind == SliceKind::squared && p != 1.0) return std::numeric_limits<double>::infinity();
  const DiscreteMeasure a = merge_duplicates(mu);
  const DiscreteMeasure b = merge_duplicates(nu);
  if (a.size() + b.size() > kUpperBoundAtomLimit) return std::numeric_limits<double>::infinity();

  Eigen::MatrixXd cost(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto x = a.point(i);
      const auto y = b.point(j);
      double c;
      if (kind == SliceKind::linear) {
        c = std::pow((x - y).norm(), p);
      } else {
        c = symmetric_op_norm(x * x.transpose() - y * y.transpose());
      }
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
    }
  }
  const double total = solve_transport(a.weights(), b.weights(), cost).cost;
  return p == 1.0 ? total : std::pow(std::max(total, 0.0), 1.0 / p);
}

CertifiedValue max_sliced_grid(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, double tol,
                               Execution exec, SliceKind kind) {
  check_pair(mu, nu);
  check_p(p);
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  const auto d = static_cast<int>(mu.dim());
  if (d > 3) throw UnsupportedError("grid method requires dimension <= 3 (got " + std::to_string(d) + ")");

  const DiscreteMeasure a = merge_duplicates(mu);
  const DiscreteMeasure b = merge_duplicates(nu);
  SliceObjective obj(a, b, p, kind);
  auto f = [&obj](const Vector& v) {
    thread_local SliceWorkspace ws;
    return obj.value(obj.cost(v, ws, false));
  };
  const auto r = certified_sphere_max(d, f, direction_lipschitz(a, b, kind), tol, exec,
                                      sliced_upper_bound(a, b, p, kind));
  return CertifiedValue{r.value, r.gap, Frame(Direction::normalized(r.argmax))};
}

CertifiedValue max_sliced_pga(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                              const PgaOptions& options, SliceKind kind) {
  check_pair(mu, nu);
  check_p(p);
  if (options.restarts < 1) throw ValidationError("restarts must be at least 1");
  const auto d = mu.dim();
  const DiscreteMeasure merged_mu = merge_duplicates(mu);
  const DiscreteMeasure merged_nu = merge_duplicates(nu);
  SliceObjective obj(merged_mu, merged_nu, p, kind);

  if (d == 1) {
    SliceWorkspace ws;
    const Vector e = Vector::Ones(1);
    return CertifiedValue{obj.value(obj.cost(e, ws, false)), std::numeric_limits<double>::infinity(),
                          Frame(Direction(e))};
  }

  // Start 0 is the top eigenvector of the second-moment difference; starts
  // 1..restarts are uniform on the sphere, each from its own derived seed.
  std::vector<Vector> starts(static_cast<std::size_t>(options.restarts) + 1);
  bool found = false;
  Vector eig = top_moment_difference_direction(merged_mu, merged_nu, &found);
  if (found) {
    starts[0] = eig;
  } else {
    Rng rng(derive_seed(options.seed, 0));
    starts[0] = rng.unit_vector(d);
  }
  for (int r = 1; r <= options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    starts[static_cast<std::size_t>(r)] = rng.unit_vector(d);
  }

  std::vector<AscentResult> results(starts.size(), AscentResult{0.0, Vector()});
  const auto count = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    SliceWorkspace ws;
    results[static_cast<std::size_t>(k)] = ascend_on_sphere(obj, starts[static_cast<std::size_t>(k)], options, ws);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].cost > results[best].cost) best = k;
  }
  return CertifiedValue{obj.value(results[best].cost), std::numeric_limits<double>::infinity(),
                        Frame(Direction::normalized(results[best].v))};
}

double w1s_objective(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Frame& frame) {
  check_pair(mu, nu);
  if (frame.dim() != mu.dim()) throw ValidationError("frame and measure dimensions differ");
  return evaluate_frame(mu, nu, frame.vectors(), false).value;
}

CertifiedValue w1s_projection_robust(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int s,
                                     const PgaOptions& options) {
  check_pair(mu, nu);
  if (s < 1) throw ValidationError("s must be at least 1");
  if (s > mu.dim()) throw ValidationError("s must not exceed the dimension");
  if (options.restarts < 1) throw ValidationError("restarts must be at least 1");

  const CertifiedValue single = max_sliced_pga(mu, nu, 1.0, options);
  if (s == 1) return single;

  const auto d = mu.dim();
  const auto ss = static_cast<std::size_t>(s);
  // Start 0: the s = 1 maximiser padded with zeros, whose value is exactly
  // W_{1,1}; ascent only accepts improvements, so the result never drops
  // below it. Start 1: the same maximiser with random companions. The rest
  // are fully random frames.
  std::vector<std::vector<Vector>> starts;
  std::vector<Vector> padded(ss, Vector::Zero(d));
  padded[0] = single.argmax[0];
  starts.push_back(padded);
  {
    Rng rng(derive_seed(options.seed, 1000));
    std::vector<Vector> mixed = padded;
    for (std::size_t k = 1; k < ss; ++k) mixed[k] = rng.unit_vector(d);
    starts.push_back(mixed);
  }
  for (int r = 1; r <= options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, 1000 + static_cast<std::uint64_t>(r)));
    std::vector<Vector> frame(ss);
    for (auto& v : frame) v = rng.unit_vector(d);
    starts.push_back(std::move(frame));
  }

  std::vector<FrameAscent> results(starts.size(), FrameAscent{0.0, {}});
  const auto count = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    results[static_cast<std::size_t>(k)] = ascend_frame(mu, nu, starts[static_cast<std::size_t>(k)], options);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].value > results[best].value) best = k;
  }
  return CertifiedValue{results[best].value, std::numeric_limits<double>::infinity(), Frame(results[best].frame)};
}

}  // namespace mswlab
