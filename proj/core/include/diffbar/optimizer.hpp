#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diffbar/differential.hpp"
#include "diffbar/losses.hpp"
#include "diffbar/parametrizations.hpp"

namespace diffbar {

struct step_schedule {
  enum class kind { constant, inverse_iter };

  kind shape = kind::constant;
  double rate = 1e-2;

  // iter counts from 1
  double at(int iter) const {
    return shape == kind::constant ? rate : rate / static_cast<double>(iter);
  }
};

enum class retraction_kind { none, sphere, filtration };

// gradient descent on theta through diagram lifts. loss must be scalar;
// degrees are weighted and summed. the optional regularizer returns its value
// and, when the pointer is non-null, writes its gradient there.
struct optimization_problem {
  std::shared_ptr<const parametrization> family;
  std::vector<std::pair<int, double>> degrees;  // (degree, weight)
  std::shared_ptr<const loss_on_barcodes> loss;
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)> regularizer;
  Eigen::VectorXd theta0;
  step_schedule schedule;
  retraction_kind retract = retraction_kind::none;
  int max_iters = 100;
  double grad_tolerance = 1e-8;
  int max_halvings = 10;
};

enum class run_status { converged, iteration_limit, stalled };

struct trace_record {
  int iter = 0;
  Eigen::VectorXd theta;
  double loss = 0;
  double grad_norm = 0;
  double step_rate = 0;  // rate that produced this point; 0 for the initial record
  bool smooth = true;    // every certificate held when evaluating here
  std::string note;      // comma-joined: halved:k, one-sided, projected, stalled
};

struct run_trace {
  run_status status = run_status::iteration_limit;
  std::vector<trace_record> records;

  double initial_loss() const { return records.front().loss; }
  double final_loss() const { return records.back().loss; }
  const Eigen::VectorXd& final_theta() const { return records.back().theta; }
};

// L-inf optimal monotone repair: one pass of running face maxima M, then
// subtract half the largest correction so over- and under-shoot balance.
std::vector<double> filtration_projection(const simplicial_complex& k,
                                          const std::vector<double>& values);

Eigen::VectorXd retract_point(retraction_kind kind, const parametrization& family,
                              const Eigen::VectorXd& raw);

Eigen::VectorXd apply_retraction(const optimization_problem& problem, const Eigen::VectorXd& raw,
                                 bool* changed = nullptr);

// records one entry per accepted point, starting with theta0. descent steps
// halve the rate up to max_halvings while the loss increases, then accept.
// singular parameters fall back to one-sided probes (previous direction
// first, then signed basis directions); if every probe is unstable the run
// stops with run_status::stalled.
run_trace run(const optimization_problem& problem);

}  // namespace diffbar
