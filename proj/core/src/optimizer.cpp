#include "diffbar/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diffbar/barcode_space.hpp"
#include "diffbar/errors.hpp"

namespace diffbar {

std::vector<double> filtration_projection(const simplicial_complex& k,
                                          const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != k.size())
    throw shape_error("value length does not match complex size");
  // canonical order visits faces before cofaces, so one pass suffices
  std::vector<double> m = values;
  double delta = 0;
  for (int s = 0; s < k.size(); ++s) {
    for (int face : k.facets(s)) m[s] = std::max(m[s], m[face]);
    delta = std::max(delta, m[s] - values[s]);
  }
  for (double& v : m) v -= delta / 2;
  return m;
}

Eigen::VectorXd retract_point(retraction_kind kind, const parametrization& family,
                              const Eigen::VectorXd& raw) {
  switch (kind) {
    case retraction_kind::none:
      return raw;
    case retraction_kind::sphere: {
      const double nrm = raw.norm();
      return nrm <= 1e-12 ? raw : Eigen::VectorXd(raw / nrm);
    }
    case retraction_kind::filtration: {
      const std::vector<double> fixed = filtration_projection(
          family.complex(), std::vector<double>(raw.data(), raw.data() + raw.size()));
      return Eigen::Map<const Eigen::VectorXd>(fixed.data(), fixed.size());
    }
  }
  return raw;
}

Eigen::VectorXd apply_retraction(const optimization_problem& problem, const Eigen::VectorXd& raw,
                                 bool* changed) {
  Eigen::VectorXd out = retract_point(problem.retract, *problem.family, raw);
  if (changed) *changed = (out - raw).lpNorm<Eigen::Infinity>() > 1e-12;
  return out;
}

namespace {

double loss_value_at(const optimization_problem& p, const Eigen::VectorXd& theta) {
  double total = 0;
  for (const auto& [degree, weight] : p.degrees) {
    const ordered_barcode x = to_ordered(diagram(p.family->value(theta), degree));
    total += weight * scalar_value(*p.loss, x);
  }
  if (p.regularizer) total += p.regularizer(theta, nullptr);
  return total;
}

struct eval_result {
  double loss = 0;
  Eigen::VectorXd grad;
  bool have_grad = false;
  bool smooth = true;
  bool one_sided = false;
};

eval_result evaluate(const optimization_problem& p, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd* prev_dir) {
  eval_result r;
  r.grad = Eigen::VectorXd::Zero(theta.size());
  for (const auto& [degree, weight] : p.degrees) {
    try {
      const lift l = build_lift(*p.family, theta, degree);
      const Eigen::MatrixXd bd = differential(l, *p.family, theta);
      const ordered_barcode x = l.evaluate(p.family->value(theta));
      r.loss += weight * scalar_value(*p.loss, x);
      r.grad += weight * chain_rule(bd, scalar_grad(*p.loss, x));
      r.smooth = r.smooth && p.loss->smooth_at(x);
    } catch (const singular_parameter&) {
      r.smooth = false;
      r.one_sided = true;
      bool found = false;
      auto try_direction = [&](Eigen::VectorXd u) {
        if (found) return;
        const double nrm = u.norm();
        if (nrm <= 1e-12) return;
        u /= nrm;
        try {
          const direction_probe probe = directional_derivative(*p.family, theta, u, degree);
          const ordered_barcode x = probe.side_lift.evaluate(p.family->value(theta));
          r.loss += weight * scalar_value(*p.loss, x);
          r.grad += weight * chain_rule(probe.side_jacobian, scalar_grad(*p.loss, x));
          found = true;
        } catch (const unstable_direction&) {
        } catch (const not_on_sphere&) {
        } catch (const not_positive_definite&) {
        }
      };
      if (prev_dir) try_direction(*prev_dir);
      for (int i = 0; i < theta.size() && !found; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(theta.size());
        e[i] = 1;
        try_direction(e);
        if (!found) {
          e[i] = -1;
          try_direction(e);
        }
      }
      if (!found) return r;  // have_grad stays false: stalled
    }
  }
  if (p.regularizer) {
    Eigen::VectorXd rg = Eigen::VectorXd::Zero(theta.size());
    r.loss += p.regularizer(theta, &rg);
    r.grad += rg;
  }
  r.have_grad = true;
  return r;
}

void validate(const optimization_problem& p) {
  if (!p.family) throw shape_error("problem needs a parametrization");
  if (!p.loss) throw shape_error("problem needs a loss");
  if (p.loss->output_dim() != 1) throw shape_error("optimizer needs a scalar loss");
  if (p.degrees.empty()) throw shape_error("problem needs at least one degree");
  for (const auto& [degree, weight] : p.degrees) {
    if (degree < 0 || degree > p.family->complex().dimension())
      throw bad_degree("problem degree outside complex dimensions");
    if (!(weight > 0)) throw shape_error("degree weights must be positive");
  }
  if (p.theta0.size() != p.family->param_dim())
    throw shape_error("initial parameter has wrong length");
  if (p.max_iters < 0) throw shape_error("iteration budget must be non-negative");
  if (p.max_halvings < 0) throw shape_error("halving budget must be non-negative");
}

std::string join_notes(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += ",";
    out += part;
  }
  return out;
}

}  // namespace

run_trace run(const optimization_problem& p) {
  validate(p);
  run_trace trace;

  Eigen::VectorXd theta = p.theta0;
  eval_result cur = evaluate(p, theta, nullptr);

  trace_record rec0;
  rec0.iter = 0;
  rec0.theta = theta;
  if (!cur.have_grad) {
    rec0.loss = loss_value_at(p, theta);
    rec0.smooth = false;
    rec0.note = "stalled";
    trace.records.push_back(std::move(rec0));
    trace.status = run_status::stalled;
    return trace;
  }
  rec0.loss = cur.loss;
  rec0.grad_norm = cur.grad.norm();
  rec0.smooth = cur.smooth;
  if (cur.one_sided) rec0.note = "one-sided";
  trace.records.push_back(std::move(rec0));

  if (cur.grad.norm() <= p.grad_tolerance || cur.loss <= 0) {
    trace.status = run_status::converged;
    return trace;
  }

  Eigen::VectorXd prev_dir;
  bool have_prev = false;
  for (int iter = 1; iter <= p.max_iters; ++iter) {
    double rate = p.schedule.at(iter);
    const Eigen::VectorXd dir = -cur.grad;

    Eigen::VectorXd cand;
    bool projected = false;
    int halvings = 0;
    for (;; ++halvings) {
      cand = apply_retraction(p, theta + rate * dir, &projected);
      if (loss_value_at(p, cand) <= cur.loss + 1e-12 || halvings >= p.max_halvings) break;
      rate /= 2;
    }

    prev_dir = cand - theta;
    have_prev = prev_dir.norm() > 1e-12;
    theta = cand;
    cur = evaluate(p, theta, have_prev ? &prev_dir : nullptr);

    trace_record rec;
    rec.iter = iter;
    rec.theta = theta;
    rec.step_rate = rate;
    std::vector<std::string> notes;
    if (halvings > 0) notes.push_back("halved:" + std::to_string(halvings));
    if (!cur.have_grad) {
      rec.loss = loss_value_at(p, theta);
      rec.smooth = false;
      notes.push_back("stalled");
      rec.note = join_notes(notes);
      trace.records.push_back(std::move(rec));
      trace.status = run_status::stalled;
      return trace;
    }
    if (cur.one_sided) notes.push_back("one-sided");
    if (projected) notes.push_back("projected");
    rec.loss = cur.loss;
    rec.grad_norm = cur.grad.norm();
    rec.smooth = cur.smooth;
    rec.note = join_notes(notes);
    trace.records.push_back(std::move(rec));

    if (cur.grad.norm() <= p.grad_tolerance || cur.loss <= 0) {
      trace.status = run_status::converged;
      return trace;
    }
  }
  trace.status = run_status::iteration_limit;
  return trace;
}

}  // namespace diffbar
