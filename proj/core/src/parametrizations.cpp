#include "diffbar/parametrizations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "diffbar/errors.hpp"

namespace diffbar {

namespace {

constexpr double kSmoothTol = 1e-9;

void check_theta(const Eigen::VectorXd& theta, int expected, const char* who) {
  if (theta.size() != expected) {
    std::ostringstream msg;
    msg << who << ": parameter has " << theta.size() << " entries, expected " << expected;
    throw shape_error(msg.str());
  }
}

bool pairwise_distinct(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] <= tol) return false;
  return true;
}

// max filter over vertices, reusing exact vertex values so shared branches tie
// exactly. argmax is the first attaining vertex in id order.
std::vector<double> max_over_vertices(const simplicial_complex& k, const Eigen::VectorXd& vertex_values) {
  std::vector<double> out(k.size());
  for (int s = 0; s < k.size(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (vertex_id v : k.at(s).vertices)
      best = std::max(best, vertex_values[k.dense_vertex_index(v)]);
    out[s] = best;
  }
  return out;
}

int argmax_vertex(const simplicial_complex& k, int s, const Eigen::VectorXd& vertex_values) {
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (vertex_id v : k.at(s).vertices) {
    const int dv = k.dense_vertex_index(v);
    if (vertex_values[dv] > best_val) {
      best_val = vertex_values[dv];
      best = dv;
    }
  }
  return best;
}

}  // namespace

// ---- height ----------------------------------------------------------------

height_parametrization::height_parametrization(simplicial_complex k, Eigen::MatrixXd coords)
    : k_(std::move(k)), coords_(std::move(coords)) {
  if (coords_.rows() != k_.vertex_count())
    throw shape_error("coordinate rows do not match vertex count");
  if (coords_.cols() < 1) throw shape_error("ambient dimension must be positive");
}

Eigen::VectorXd height_parametrization::vertex_heights(const Eigen::VectorXd& theta) const {
  return coords_ * theta;
}

filter_function height_parametrization::value(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "height");
  if (std::abs(theta.norm() - 1.0) > kSmoothTol)
    throw not_on_sphere("height direction must be a unit vector");
  return filter_function(k_, max_over_vertices(k_, vertex_heights(theta)));
}

Eigen::MatrixXd height_parametrization::jacobian(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "height");
  const Eigen::VectorXd h = vertex_heights(theta);
  Eigen::MatrixXd jac(k_.size(), param_dim());
  for (int s = 0; s < k_.size(); ++s) {
    const Eigen::VectorXd x = coords_.row(argmax_vertex(k_, s, h)).transpose();
    // gradient within the sphere: project out the radial component
    jac.row(s) = (x - x.dot(theta) * theta).transpose();
  }
  return jac;
}

bool height_parametrization::is_smooth_at(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "height");
  if (std::abs(theta.norm() - 1.0) > kSmoothTol) return false;
  const Eigen::VectorXd h = vertex_heights(theta);
  return pairwise_distinct(std::vector<double>(h.data(), h.data() + h.size()), kSmoothTol);
}

// ---- vertex fields ----------------------------------------------------------

linear_vertex_field::linear_vertex_field(Eigen::MatrixXd a, Eigen::VectorXd c)
    : a_(std::move(a)), c_(std::move(c)) {
  if (a_.rows() != c_.size()) throw shape_error("offset length does not match row count");
}

Eigen::VectorXd linear_vertex_field::values(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "linear field");
  return a_ * theta + c_;
}

callable_vertex_field::callable_vertex_field(
    int param_dim, int vertex_count,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> values,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian,
    std::function<bool(const Eigen::VectorXd&)> smooth)
    : dim_(param_dim),
      count_(vertex_count),
      values_(std::move(values)),
      jacobian_(std::move(jacobian)),
      smooth_(std::move(smooth)) {
  if (!values_ || !jacobian_) throw shape_error("callable field needs values and jacobian");
}

Eigen::VectorXd callable_vertex_field::values(const Eigen::VectorXd& theta) const {
  check_theta(theta, dim_, "callable field");
  Eigen::VectorXd v = values_(theta);
  if (v.size() != count_) throw shape_error("callable field returned wrong value count");
  return v;
}

Eigen::MatrixXd callable_vertex_field::jacobian(const Eigen::VectorXd& theta) const {
  check_theta(theta, dim_, "callable field");
  Eigen::MatrixXd j = jacobian_(theta);
  if (j.rows() != count_ || j.cols() != dim_)
    throw shape_error("callable field returned wrong jacobian shape");
  return j;
}

bool callable_vertex_field::smooth_at(const Eigen::VectorXd& theta) const {
  return smooth_ ? smooth_(theta) : true;
}

// ---- lower star -------------------------------------------------------------

lower_star_parametrization::lower_star_parametrization(simplicial_complex k,
                                                       std::shared_ptr<const vertex_field> field)
    : k_(std::move(k)), field_(std::move(field)) {
  if (!field_) throw shape_error("lower star needs a vertex field");
  if (field_->vertex_count() != k_.vertex_count())
    throw shape_error("vertex field size does not match complex");
}

filter_function lower_star_parametrization::value(const Eigen::VectorXd& theta) const {
  return filter_function(k_, max_over_vertices(k_, field_->values(theta)));
}

Eigen::MatrixXd lower_star_parametrization::jacobian(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd v = field_->values(theta);
  const Eigen::MatrixXd jv = field_->jacobian(theta);
  Eigen::MatrixXd jac(k_.size(), param_dim());
  for (int s = 0; s < k_.size(); ++s) jac.row(s) = jv.row(argmax_vertex(k_, s, v));
  return jac;
}

bool lower_star_parametrization::is_smooth_at(const Eigen::VectorXd& theta) const {
  if (!field_->smooth_at(theta)) return false;
  const Eigen::VectorXd v = field_->values(theta);
  return pairwise_distinct(std::vector<double>(v.data(), v.data() + v.size()), kSmoothTol);
}

// ---- rips -------------------------------------------------------------------

namespace {

simplicial_complex full_skeleton(int n_points, int max_dim) {
  if (n_points < 1) throw empty_complex("rips needs at least one point");
  if (max_dim < 0) throw shape_error("max dimension must be non-negative");
  const int gen_size = std::min(n_points, max_dim + 1);
  std::vector<std::vector<vertex_id>> gens;
  std::vector<vertex_id> pick(gen_size);
  // all gen_size-subsets of 0..n-1
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == gen_size) {
      gens.push_back(pick);
      return;
    }
    for (int v = start; v <= n_points - (gen_size - depth); ++v) {
      pick[depth] = v;
      rec(v + 1, depth + 1);
    }
  };
  rec(0, 0);
  return simplicial_complex::build(gens);
}

}  // namespace

rips_parametrization::rips_parametrization(int n_points, int ambient_dim, int max_dim)
    : n_(n_points), d_(ambient_dim), k_(full_skeleton(n_points, max_dim)) {
  if (ambient_dim < 1) throw shape_error("ambient dimension must be positive");
}

Eigen::MatrixXd rips_parametrization::points_of(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "rips");
  Eigen::MatrixXd pts(n_, d_);
  for (int i = 0; i < n_; ++i) pts.row(i) = theta.segment(i * d_, d_).transpose();
  return pts;
}

filter_function rips_parametrization::value(const Eigen::VectorXd& theta) const {
  const Eigen::MatrixXd pts = points_of(theta);
  std::vector<double> vals(k_.size(), 0.0);
  for (int s = 0; s < k_.size(); ++s) {
    const auto& vs = k_.at(s).vertices;
    double best = 0.0;
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t b = a + 1; b < vs.size(); ++b)
        best = std::max(best, (pts.row(vs[a]) - pts.row(vs[b])).norm());
    vals[s] = best;
  }
  return filter_function(k_, vals);
}

Eigen::MatrixXd rips_parametrization::jacobian(const Eigen::VectorXd& theta) const {
  const Eigen::MatrixXd pts = points_of(theta);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k_.size(), param_dim());
  for (int s = 0; s < k_.size(); ++s) {
    const auto& vs = k_.at(s).vertices;
    if (vs.size() < 2) continue;
    double best = -1.0;
    int bi = -1, bj = -1;
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t b = a + 1; b < vs.size(); ++b) {
        const double dist = (pts.row(vs[a]) - pts.row(vs[b])).norm();
        if (dist > best) {
          best = dist;
          bi = vs[a];
          bj = vs[b];
        }
      }
    const Eigen::RowVectorXd dir = (pts.row(bi) - pts.row(bj)) / best;
    jac.row(s).segment(bi * d_, d_) = dir;
    jac.row(s).segment(bj * d_, d_) = -dir;
  }
  return jac;
}

bool rips_parametrization::is_smooth_at(const Eigen::VectorXd& theta) const {
  const Eigen::MatrixXd pts = points_of(theta);
  std::vector<double> dists;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) dists.push_back((pts.row(i) - pts.row(j)).norm());
  for (double dist : dists)
    if (dist <= kSmoothTol) return false;
  return pairwise_distinct(dists, kSmoothTol);
}

// ---- ellipsoid rips ---------------------------------------------------------

namespace {

bool positive_definite(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0;
}

}  // namespace

ellipsoid_rips_parametrization::ellipsoid_rips_parametrization(Eigen::MatrixXd points, int max_dim)
    : points_(std::move(points)),
      n_(static_cast<int>(points_.rows())),
      d_(static_cast<int>(points_.cols())),
      chart_dim_(static_cast<int>(points_.cols() * (points_.cols() + 1) / 2)),
      k_(full_skeleton(n_, max_dim)) {
  if (d_ < 1) throw shape_error("ambient dimension must be positive");
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if ((points_.row(i) - points_.row(j)).norm() <= kSmoothTol)
        throw shape_error("ellipsoid rips needs pairwise distinct points");
}

Eigen::MatrixXd ellipsoid_rips_parametrization::matrix_at(const Eigen::VectorXd& theta, int point) const {
  check_theta(theta, param_dim(), "ellipsoid rips");
  Eigen::MatrixXd a(d_, d_);
  int at = point * chart_dim_;
  for (int r = 0; r < d_; ++r)
    for (int c = r; c < d_; ++c) {
      a(r, c) = theta[at];
      a(c, r) = theta[at];
      ++at;
    }
  return a;
}

filter_function ellipsoid_rips_parametrization::value(const Eigen::VectorXd& theta) const {
  std::vector<Eigen::MatrixXd> mats(n_);
  for (int i = 0; i < n_; ++i) {
    mats[i] = matrix_at(theta, i);
    if (!positive_definite(mats[i]))
      throw not_positive_definite("ellipsoid matrix is not positive definite");
  }
  std::vector<double> vals(k_.size(), 0.0);
  auto scale = [&](int i, int j) {
    const Eigen::VectorXd chord = (points_.row(i) - points_.row(j)).transpose();
    const double dist = chord.norm();
    const Eigen::VectorXd u = chord / dist;
    return 2.0 * dist / (std::sqrt(u.dot(mats[i] * u)) + std::sqrt(u.dot(mats[j] * u)));
  };
  for (int s = 0; s < k_.size(); ++s) {
    const auto& vs = k_.at(s).vertices;
    double best = 0.0;
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t b = a + 1; b < vs.size(); ++b) best = std::max(best, scale(vs[a], vs[b]));
    vals[s] = best;
  }
  return filter_function(k_, vals);
}

Eigen::MatrixXd ellipsoid_rips_parametrization::jacobian(const Eigen::VectorXd& theta) const {
  std::vector<Eigen::MatrixXd> mats(n_);
  for (int i = 0; i < n_; ++i) mats[i] = matrix_at(theta, i);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k_.size(), param_dim());
  for (int s = 0; s < k_.size(); ++s) {
    const auto& vs = k_.at(s).vertices;
    if (vs.size() < 2) continue;
    double best = -1.0;
    int bi = -1, bj = -1;
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t b = a + 1; b < vs.size(); ++b) {
        const int i = vs[a], j = vs[b];
        const Eigen::VectorXd chord = (points_.row(i) - points_.row(j)).transpose();
        const double dist = chord.norm();
        const Eigen::VectorXd u = chord / dist;
        const double r =
            2.0 * dist / (std::sqrt(u.dot(mats[i] * u)) + std::sqrt(u.dot(mats[j] * u)));
        if (r > best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    const Eigen::VectorXd chord = (points_.row(bi) - points_.row(bj)).transpose();
    const double dist = chord.norm();
    const Eigen::VectorXd u = chord / dist;
    const double qi = u.dot(mats[bi] * u), qj = u.dot(mats[bj] * u);
    const double denom = std::sqrt(qi) + std::sqrt(qj);
    // r = 2 dist / denom; d r / d q = -(2 dist / denom^2) / (2 sqrt(q))
    auto fill = [&](int point, double q) {
      const double dr_dq = -(2.0 * dist / (denom * denom)) / (2.0 * std::sqrt(q));
      int at = point * chart_dim_;
      for (int r_ = 0; r_ < d_; ++r_)
        for (int c = r_; c < d_; ++c) {
          const double mult = (r_ == c) ? 1.0 : 2.0;  // off-diagonal entries appear twice in u'Au
          jac(s, at) = dr_dq * mult * u[r_] * u[c];
          ++at;
        }
    };
    fill(bi, qi);
    fill(bj, qj);
  }
  return jac;
}

bool ellipsoid_rips_parametrization::is_smooth_at(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "ellipsoid rips");
  std::vector<Eigen::MatrixXd> mats(n_);
  for (int i = 0; i < n_; ++i) {
    mats[i] = matrix_at(theta, i);
    if (!positive_definite(mats[i])) return false;
  }
  std::vector<double> scales;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const Eigen::VectorXd chord = (points_.row(i) - points_.row(j)).transpose();
      const double dist = chord.norm();
      const Eigen::VectorXd u = chord / dist;
      scales.push_back(2.0 * dist /
                       (std::sqrt(u.dot(mats[i] * u)) + std::sqrt(u.dot(mats[j] * u))));
    }
  return pairwise_distinct(scales, kSmoothTol);
}

// ---- raw filter -------------------------------------------------------------

raw_filter_parametrization::raw_filter_parametrization(simplicial_complex k) : k_(std::move(k)) {}

bool raw_filter_parametrization::monotone(const Eigen::VectorXd& theta) const {
  for (int s = 0; s < k_.size(); ++s)
    for (int face : k_.facets(s))
      if (theta[face] > theta[s]) return false;
  return true;
}

filter_function raw_filter_parametrization::value(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "raw filter");
  if (!monotone(theta)) return filter_function(k_, std::vector<double>(k_.size(), 0.0));
  return filter_function(k_, std::vector<double>(theta.data(), theta.data() + theta.size()));
}

Eigen::MatrixXd raw_filter_parametrization::jacobian(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "raw filter");
  if (!monotone(theta)) return Eigen::MatrixXd::Zero(k_.size(), k_.size());
  return Eigen::MatrixXd::Identity(k_.size(), k_.size());
}

bool raw_filter_parametrization::is_smooth_at(const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim(), "raw filter");
  for (int s = 0; s < k_.size(); ++s)
    for (int face : k_.facets(s))
      if (theta[s] - theta[face] <= kSmoothTol) return false;
  return true;
}

}  // namespace diffbar
