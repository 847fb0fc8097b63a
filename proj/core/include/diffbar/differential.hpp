#pragma once

#include <Eigen/Dense>
#include <vector>

#include "diffbar/parametrizations.hpp"
#include "diffbar/persistence.hpp"

namespace diffbar {

// local smooth section of the diagram map: a frozen template read off at a
// smooth parameter. evaluating it on nearby filters of the same ordering class
// reproduces their diagrams after quotienting.
struct lift {
  int degree = 0;
  barcode_template tmpl;
  Eigen::VectorXd base_point;

  int pair_count() const { return tmpl.pair_count(); }
  int unpaired_count() const { return tmpl.unpaired_count(); }
  int dim() const { return 2 * tmpl.pair_count() + tmpl.unpaired_count(); }

  ordered_barcode evaluate(const filter_function& f) const { return realize_template(tmpl, f); }
};

// requires F.is_smooth_at(theta) and a locally constant ordering: any two
// filter values within 1e-9 must carry identical jacobian rows (same analytic
// branch). otherwise throws singular_parameter with the offending simplex
// pairs as witnesses.
lift build_lift(const parametrization& f, const Eigen::VectorXd& theta, int degree);

// jacobian of the lifted diagram map: rows of F's jacobian selected in the
// template reading order. (2m+n) x param_dim.
Eigen::MatrixXd differential(const lift& l, const parametrization& f, const Eigen::VectorXd& theta);

// pull a loss gradient on slot coordinates back to parameter space:
// barcode_diff' * loss_grad.
Eigen::VectorXd chain_rule(const Eigen::MatrixXd& barcode_diff, const Eigen::VectorXd& loss_grad);

// one-sided derivative data along unit direction u. the stratum is found by
// probing theta + eps*u and halving eps until two consecutive pre-orders
// agree; throws unstable_direction after 20 halvings.
struct direction_probe {
  Eigen::VectorXd along_u;        // side jacobian applied to u
  Eigen::MatrixXd side_jacobian;  // jacobian of the side stratum's lift
  lift side_lift;
  double probe_step = 0;  // stabilized eps
};

direction_probe directional_derivative(const parametrization& f, const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& u, int degree);

// first-order remainder of the lifted map along a fixed direction:
// ratio(r) = db(actual diagram at theta + r*dir, quotient of linear model) / r.
struct taylor_report {
  std::vector<double> radii;
  std::vector<double> remainders;
  std::vector<double> ratios;
  bool decreasing = false;  // ratios non-increasing over the given radii
};

taylor_report taylor_remainder_check(const parametrization& f, const Eigen::VectorXd& theta,
                                     int degree, const std::vector<double>& radii,
                                     const Eigen::VectorXd& direction);

}  // namespace diffbar
