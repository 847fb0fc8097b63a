#include "diffbar/differential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "diffbar/barcode_space.hpp"
#include "diffbar/errors.hpp"

namespace diffbar {

namespace {

constexpr double kTieTol = 1e-9;
constexpr double kRowTol = 1e-9;

// ties are fine when both simplices ride the same analytic branch; a tie with
// disagreeing derivative rows marks a stratum boundary.
std::vector<std::pair<int, int>> branch_conflicts(const filter_function& fv,
                                                  const Eigen::MatrixXd& jac) {
  const int n = fv.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
  std::vector<std::pair<int, int>> bad;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n && fv[order[j]] - fv[order[i]] <= kTieTol; ++j) {
      const int a = std::min(order[i], order[j]), b = std::max(order[i], order[j]);
      if ((jac.row(a) - jac.row(b)).lpNorm<Eigen::Infinity>() > kRowTol) bad.emplace_back(a, b);
    }
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

}  // namespace

lift build_lift(const parametrization& f, const Eigen::VectorXd& theta, int degree) {
  if (!f.is_smooth_at(theta))
    throw singular_parameter({}, "parametrization is not smooth at this parameter");
  const filter_function fv = f.value(theta);
  auto bad = branch_conflicts(fv, f.jacobian(theta));
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << bad.size() << " filter value tie(s) across different branches, first pair ("
        << bad.front().first << ", " << bad.front().second << ")";
    throw singular_parameter(std::move(bad), msg.str());
  }
  lift l;
  l.degree = degree;
  l.tmpl = build_barcode_template(fv, degree);
  l.base_point = theta;
  return l;
}

Eigen::MatrixXd differential(const lift& l, const parametrization& f, const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd jac = f.jacobian(theta);
  Eigen::MatrixXd out(l.dim(), jac.cols());
  const int m = l.pair_count();
  for (int i = 0; i < m; ++i) {
    out.row(2 * i) = jac.row(l.tmpl.pairs[i].first);
    out.row(2 * i + 1) = jac.row(l.tmpl.pairs[i].second);
  }
  for (int j = 0; j < l.unpaired_count(); ++j) out.row(2 * m + j) = jac.row(l.tmpl.unpaired[j]);
  return out;
}

Eigen::VectorXd chain_rule(const Eigen::MatrixXd& barcode_diff, const Eigen::VectorXd& loss_grad) {
  if (loss_grad.size() != barcode_diff.rows())
    throw shape_error("loss gradient length does not match barcode dimension");
  return barcode_diff.transpose() * loss_grad;
}

direction_probe directional_derivative(const parametrization& f, const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& u, int degree) {
  if (u.size() != theta.size()) throw shape_error("direction length does not match parameter");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw shape_error("direction must be a unit vector");

  double eps = 1e-6;
  preorder_signature prev(f.value(theta + eps * u));
  double stable = -1;
  for (int halving = 0; halving < 20; ++halving) {
    const double next_eps = eps / 2;
    preorder_signature next(f.value(theta + next_eps * u));
    if (next == prev) {
      stable = next_eps;
      break;
    }
    prev = next;
    eps = next_eps;
  }
  if (stable < 0)
    throw unstable_direction("pre-order along the direction never stabilized");

  const Eigen::VectorXd probe_point = theta + stable * u;
  direction_probe out;
  out.probe_step = stable;
  out.side_lift.degree = degree;
  out.side_lift.tmpl = build_barcode_template(f.value(probe_point), degree);
  out.side_lift.base_point = theta;
  // at a smooth base point the side jacobian is exact; on a stratum boundary
  // it is read just inside the side stratum (bias of order probe_step)
  const Eigen::VectorXd& eval_at = f.is_smooth_at(theta) ? theta : probe_point;
  out.side_jacobian = differential(out.side_lift, f, eval_at);
  out.along_u = out.side_jacobian * u;
  return out;
}

taylor_report taylor_remainder_check(const parametrization& f, const Eigen::VectorXd& theta,
                                     int degree, const std::vector<double>& radii,
                                     const Eigen::VectorXd& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw shape_error("direction must be a unit vector");
  const lift l = build_lift(f, theta, degree);
  const Eigen::MatrixXd bd = differential(l, f, theta);
  const ordered_barcode base = l.evaluate(f.value(theta));

  taylor_report rep;
  rep.radii = radii;
  for (double r : radii) {
    const Eigen::VectorXd h = r * direction;
    ordered_barcode predicted = base;
    predicted.data += bd * h;
    const barcode actual = diagram(f.value(theta + h), degree);
    const double rem = bottleneck(actual, quotient(predicted));
    rep.remainders.push_back(rem);
    rep.ratios.push_back(rem / r);
  }
  rep.decreasing = true;
  for (size_t i = 1; i < rep.ratios.size(); ++i)
    if (rep.ratios[i] > rep.ratios[i - 1] + 1e-12) rep.decreasing = false;
  return rep;
}

}  // namespace diffbar
