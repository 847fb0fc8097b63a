#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "diffbar/complex.hpp"

namespace diffbar {

// differentiable family of monotone filters theta -> F(theta) on a fixed
// complex. jacobian() rows follow canonical simplex order; it is only
// meaningful where is_smooth_at holds (each family's smoothness test certifies
// that every filter value follows a single analytic branch near theta).
class parametrization {
 public:
  virtual ~parametrization() = default;
  virtual int param_dim() const = 0;
  virtual const simplicial_complex& complex() const = 0;
  virtual filter_function value(const Eigen::VectorXd& theta) const = 0;
  // complex().size() x param_dim()
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const = 0;
  virtual bool is_smooth_at(const Eigen::VectorXd& theta) const = 0;
};

// height function on an embedded complex in direction theta (unit sphere).
// F(simplex) = max over its vertices of <coords(v), theta>.
class height_parametrization : public parametrization {
 public:
  // coords: one row per vertex, in dense vertex-index order
  height_parametrization(simplicial_complex k, Eigen::MatrixXd coords);

  int param_dim() const override { return static_cast<int>(coords_.cols()); }
  const simplicial_complex& complex() const override { return k_; }
  filter_function value(const Eigen::VectorXd& theta) const override;  // throws not_on_sphere
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  // on the sphere and all vertex heights pairwise distinct (tol 1e-9)
  bool is_smooth_at(const Eigen::VectorXd& theta) const override;

 private:
  simplicial_complex k_;
  Eigen::MatrixXd coords_;
  Eigen::VectorXd vertex_heights(const Eigen::VectorXd& theta) const;
};

// differentiable map theta -> one value per vertex, consumed by lower-star
class vertex_field {
 public:
  virtual ~vertex_field() = default;
  virtual int param_dim() const = 0;
  virtual int vertex_count() const = 0;
  virtual Eigen::VectorXd values(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const = 0;  // count x dim
  virtual bool smooth_at(const Eigen::VectorXd& theta) const = 0;
};

// values = a * theta + c
class linear_vertex_field : public vertex_field {
 public:
  linear_vertex_field(Eigen::MatrixXd a, Eigen::VectorXd c);

  int param_dim() const override { return static_cast<int>(a_.cols()); }
  int vertex_count() const override { return static_cast<int>(a_.rows()); }
  Eigen::VectorXd values(const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd&) const override { return a_; }
  bool smooth_at(const Eigen::VectorXd&) const override { return true; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd c_;
};

// wraps closures; caller guarantees the jacobian matches the values
class callable_vertex_field : public vertex_field {
 public:
  callable_vertex_field(int param_dim, int vertex_count,
                        std::function<Eigen::VectorXd(const Eigen::VectorXd&)> values,
                        std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian,
                        std::function<bool(const Eigen::VectorXd&)> smooth = nullptr);

  int param_dim() const override { return dim_; }
  int vertex_count() const override { return count_; }
  Eigen::VectorXd values(const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  bool smooth_at(const Eigen::VectorXd& theta) const override;

 private:
  int dim_, count_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> values_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian_;
  std::function<bool(const Eigen::VectorXd&)> smooth_;
};

// F(simplex) = max over its vertices of field value; the sublevel complexes
// are the lower stars of the vertex function.
class lower_star_parametrization : public parametrization {
 public:
  lower_star_parametrization(simplicial_complex k, std::shared_ptr<const vertex_field> field);

  int param_dim() const override { return field_->param_dim(); }
  const simplicial_complex& complex() const override { return k_; }
  filter_function value(const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  // field smooth and vertex values pairwise distinct (tol 1e-9)
  bool is_smooth_at(const Eigen::VectorXd& theta) const override;

 private:
  simplicial_complex k_;
  std::shared_ptr<const vertex_field> field_;
};

// Vietoris-Rips over a moving point cloud. theta is the flattened cloud
// (point i occupies theta[i*d .. i*d+d)). vertices enter at 0, higher
// simplices at their largest pairwise distance. complex: all simplices on n
// points up to max_dim.
class rips_parametrization : public parametrization {
 public:
  rips_parametrization(int n_points, int ambient_dim, int max_dim = 2);

  int param_dim() const override { return n_ * d_; }
  const simplicial_complex& complex() const override { return k_; }
  filter_function value(const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  // points pairwise distinct and pairwise distances pairwise distinct (1e-9)
  bool is_smooth_at(const Eigen::VectorXd& theta) const override;

 private:
  int n_, d_;
  simplicial_complex k_;
  Eigen::MatrixXd points_of(const Eigen::VectorXd& theta) const;
};

// Rips over a fixed cloud where theta deforms a metric ellipsoid at each
// point. theta packs, per point, the upper triangle (row-major) of a symmetric
// matrix A_i which must stay positive definite. edge scale:
//   r_ij = 2 |p_i - p_j| / (sqrt(u' A_i u) + sqrt(u' A_j u)),
// u the unit chord direction.
class ellipsoid_rips_parametrization : public parametrization {
 public:
  explicit ellipsoid_rips_parametrization(Eigen::MatrixXd points, int max_dim = 2);

  int param_dim() const override { return n_ * chart_dim_; }
  const simplicial_complex& complex() const override { return k_; }
  filter_function value(const Eigen::VectorXd& theta) const override;  // throws not_positive_definite
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  // all A_i positive definite and pair scales pairwise distinct (1e-9)
  bool is_smooth_at(const Eigen::VectorXd& theta) const override;

  Eigen::MatrixXd matrix_at(const Eigen::VectorXd& theta, int point) const;
  int chart_dim() const { return chart_dim_; }

 private:
  Eigen::MatrixXd points_;
  int n_, d_, chart_dim_;
  simplicial_complex k_;
};

// the identity parametrization on the polytope of monotone filters; outside
// it the value collapses to the zero filter.
class raw_filter_parametrization : public parametrization {
 public:
  explicit raw_filter_parametrization(simplicial_complex k);

  int param_dim() const override { return k_.size(); }
  const simplicial_complex& complex() const override { return k_; }
  filter_function value(const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const override;
  // strictly inside the polytope: every face margin exceeds 1e-9
  bool is_smooth_at(const Eigen::VectorXd& theta) const override;

 private:
  simplicial_complex k_;
  bool monotone(const Eigen::VectorXd& theta) const;
};

}  // namespace diffbar
