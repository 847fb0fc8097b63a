#pragma once

#include <Eigen/Dense>
#include <functional>

#include "diffbar/barcode.hpp"

namespace diffbar {

// differentiable functional on ordered barcodes. values factor through the
// quotient (slots on or below the diagonal are ignored), so any pre-image of
// the same diagram gives the same value. grad rows follow the slot layout of
// the input. smooth_at is a certificate: true means the gradient is a genuine
// derivative at x, false means it is only a subgradient choice.
class loss_on_barcodes {
 public:
  virtual ~loss_on_barcodes() = default;
  virtual int output_dim() const = 0;
  virtual Eigen::VectorXd value(const ordered_barcode& x) const = 0;
  virtual Eigen::MatrixXd grad(const ordered_barcode& x) const = 0;  // output_dim x (2m+n)
  virtual bool smooth_at(const ordered_barcode& x) const = 0;
};

double scalar_value(const loss_on_barcodes& loss, const ordered_barcode& x);
Eigen::VectorXd scalar_grad(const loss_on_barcodes& loss, const ordered_barcode& x);

// sum of lengths of finite bars above the diagonal; unbounded slots ignored
class total_persistence_loss : public loss_on_barcodes {
 public:
  int output_dim() const override { return 1; }
  Eigen::VectorXd value(const ordered_barcode& x) const override;
  Eigen::MatrixXd grad(const ordered_barcode& x) const override;
  // false when some slot sits within 1e-9 of the diagonal (clamp kink)
  bool smooth_at(const ordered_barcode& x) const override;
};

// weight on bar persistence: 0 at 0, 1 beyond t, interpolated with either a
// C^1 smoothstep or a C-infinity bump quotient on [0, t].
struct weighting_function {
  enum class kind { smoothstep, bump };

  kind shape = kind::smoothstep;
  double t = 1.0;

  weighting_function() = default;
  weighting_function(kind shape_, double t_);

  double operator()(double u) const;
  double derivative(double u) const;
};

// integration grid for the persistence image: [x0,x1] x [y0,y1] split into
// resolution^2 cells, x = birth, y = persistence (death - birth).
struct image_spec {
  double x0 = 0, x1 = 1;
  double y0 = 0, y1 = 1;
  int resolution = 8;
  double sigma = 0.1;
};

// cell masses of a sum of unit gaussians centered at (birth, persistence),
// weighted by omega(persistence). output is row-major from the low-y row.
// rejects barcodes with unbounded slots.
class persistence_image_loss : public loss_on_barcodes {
 public:
  persistence_image_loss(image_spec spec, weighting_function omega);

  int output_dim() const override { return spec_.resolution * spec_.resolution; }
  Eigen::VectorXd value(const ordered_barcode& x) const override;  // throws infinite_bars_unsupported
  Eigen::MatrixXd grad(const ordered_barcode& x) const override;
  bool smooth_at(const ordered_barcode& x) const override;

  const image_spec& spec() const { return spec_; }

 private:
  image_spec spec_;
  weighting_function omega_;
};

// user-supplied smooth map on bar endpoints, R^2 -> R^k
struct planar_map {
  int k = 1;
  std::function<Eigen::VectorXd(double, double)> value;
  std::function<Eigen::MatrixXd(double, double)> jacobian;  // k x 2
  std::function<bool(double, double)> smooth;               // optional
};

// user-supplied smooth map on unbounded births, R -> R^k
struct line_map {
  int k = 1;
  std::function<Eigen::VectorXd(double)> value;
  std::function<Eigen::VectorXd(double)> derivative;
  std::function<bool(double)> smooth;  // optional
};

// V(x) = sum over finite bars of omega(d-b) phi(b,d) + sum over unbounded
// births of psi(v)
class linear_representation_loss : public loss_on_barcodes {
 public:
  linear_representation_loss(planar_map phi, line_map psi, weighting_function omega);

  int output_dim() const override { return phi_.k; }
  Eigen::VectorXd value(const ordered_barcode& x) const override;
  Eigen::MatrixXd grad(const ordered_barcode& x) const override;
  bool smooth_at(const ordered_barcode& x) const override;

 private:
  planar_map phi_;
  line_map psi_;
  weighting_function omega_;
};

// bottleneck distance to a fixed target diagram. the gradient lives on the
// generator attaining the distance: a matched pair moves one coordinate
// (+/-1), a bar retracting to the diagonal moves both endpoints (-1/2, +1/2),
// a target bar meeting the diagonal gives a zero subgradient, an unbounded
// birth moves by +/-1.
class bottleneck_loss : public loss_on_barcodes {
 public:
  explicit bottleneck_loss(barcode target);

  int output_dim() const override { return 1; }
  Eigen::VectorXd value(const ordered_barcode& x) const override;
  Eigen::MatrixXd grad(const ordered_barcode& x) const override;
  // unique attaining generator, unique moving coordinate, value above 1e-9
  bool smooth_at(const ordered_barcode& x) const override;

  // gap protecting the certificate: distance from the second-closest
  // generator (and coordinate gap) to the attained value
  double tie_margin(const ordered_barcode& x) const;

  const barcode& target() const { return target_; }

 private:
  barcode target_;
  struct analysis;
  analysis analyze(const ordered_barcode& x) const;
};

// q-Wasserstein distance to a fixed target diagram, exact for q >= 1. the
// gradient differentiates through a frozen optimal matching.
class wasserstein_loss : public loss_on_barcodes {
 public:
  wasserstein_loss(barcode target, double q);

  int output_dim() const override { return 1; }
  Eigen::VectorXd value(const ordered_barcode& x) const override;
  Eigen::MatrixXd grad(const ordered_barcode& x) const override;
  // no coordinate ties inside matched pairs, no vanishing costs at q <= 1, no
  // cost-neutral two-swap that rewires a real point, value above 1e-9
  bool smooth_at(const ordered_barcode& x) const override;

  double tie_margin(const ordered_barcode& x) const;

  const barcode& target() const { return target_; }
  double exponent() const { return q_; }

 private:
  barcode target_;
  double q_;
  struct analysis;
  analysis analyze(const ordered_barcode& x) const;
};

}  // namespace diffbar
