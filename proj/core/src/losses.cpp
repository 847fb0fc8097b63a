#include "diffbar/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diffbar/barcode_space.hpp"
#include "diffbar/errors.hpp"
#include "internal/assignment.hpp"

namespace diffbar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDiagTol = 1e-9;  // kink window around the diagonal
constexpr double kTieTol = 1e-9;   // generator / matching tie window
constexpr double kZeroCost = 1e-12;

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// slots strictly above the diagonal survive the quotient
struct kept_slots {
  std::vector<int> slot;  // pair-slot index i, coordinates at 2i and 2i+1
  std::vector<std::pair<double, double>> pts;
};

kept_slots keep_above_diagonal(const ordered_barcode& x) {
  kept_slots k;
  for (int i = 0; i < x.m; ++i)
    if (x.birth(i) < x.death(i)) {
      k.slot.push_back(i);
      k.pts.emplace_back(x.birth(i), x.death(i));
    }
  return k;
}

double linf_dist(const std::pair<double, double>& p, const std::pair<double, double>& q) {
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}

double qpow(double x, double q) { return q == 1.0 ? x : std::pow(x, q); }

}  // namespace

double scalar_value(const loss_on_barcodes& loss, const ordered_barcode& x) {
  if (loss.output_dim() != 1) throw shape_error("loss is not scalar");
  return loss.value(x)[0];
}

Eigen::VectorXd scalar_grad(const loss_on_barcodes& loss, const ordered_barcode& x) {
  if (loss.output_dim() != 1) throw shape_error("loss is not scalar");
  return loss.grad(x).row(0).transpose();
}

// ---- total persistence --------------------------------------------------------

Eigen::VectorXd total_persistence_loss::value(const ordered_barcode& x) const {
  double total = 0;
  for (int i = 0; i < x.m; ++i) total += std::max(x.death(i) - x.birth(i), 0.0);
  Eigen::VectorXd out(1);
  out[0] = total;
  return out;
}

Eigen::MatrixXd total_persistence_loss::grad(const ordered_barcode& x) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(1, x.dim());
  for (int i = 0; i < x.m; ++i) {
    if (x.death(i) - x.birth(i) > 0) {
      g(0, 2 * i) = -1;
      g(0, 2 * i + 1) = 1;
    }
  }
  return g;
}

bool total_persistence_loss::smooth_at(const ordered_barcode& x) const {
  for (int i = 0; i < x.m; ++i)
    if (std::abs(x.death(i) - x.birth(i)) <= kDiagTol) return false;
  return true;
}

// ---- weighting ---------------------------------------------------------------

namespace {

double bump_g(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }
double bump_g_prime(double s) { return s > 0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

weighting_function::weighting_function(kind shape_, double t_) : shape(shape_), t(t_) {
  if (!(t > 0)) throw shape_error("weighting scale must be positive");
}

double weighting_function::operator()(double u) const {
  if (u <= 0) return 0;
  if (u >= t) return 1;
  const double s = u / t;
  if (shape == kind::smoothstep) return s * s * (3 - 2 * s);
  const double g = bump_g(s), h = bump_g(1 - s);
  return g / (g + h);
}

double weighting_function::derivative(double u) const {
  if (u <= 0 || u >= t) return 0;
  const double s = u / t;
  if (shape == kind::smoothstep) return (6 * s - 6 * s * s) / t;
  const double g = bump_g(s), h = bump_g(1 - s);
  const double gp = bump_g_prime(s), hp = bump_g_prime(1 - s);
  return (gp * h + g * hp) / ((g + h) * (g + h)) / t;
}

// ---- persistence image ---------------------------------------------------------

persistence_image_loss::persistence_image_loss(image_spec spec, weighting_function omega)
    : spec_(spec), omega_(omega) {
  if (!(spec_.x0 < spec_.x1) || !(spec_.y0 < spec_.y1))
    throw shape_error("image window is empty");
  if (spec_.resolution < 1) throw shape_error("image resolution must be positive");
  if (!(spec_.sigma > 0)) throw shape_error("image sigma must be positive");
}

namespace {

struct axis_masses {
  std::vector<double> mass;   // per cell, gaussian mass centered at the point
  std::vector<double> dmass;  // derivative in the center coordinate
};

axis_masses axis_integrals(double lo, double hi, int res, double center, double sigma) {
  axis_masses out;
  out.mass.resize(res);
  out.dmass.resize(res);
  const double w = (hi - lo) / res;
  for (int i = 0; i < res; ++i) {
    const double zl = (lo + i * w - center) / sigma;
    const double zh = (lo + (i + 1) * w - center) / sigma;
    out.mass[i] = normal_cdf(zh) - normal_cdf(zl);
    out.dmass[i] = (-normal_pdf(zh) + normal_pdf(zl)) / sigma;
  }
  return out;
}

void require_bounded(const ordered_barcode& x) {
  if (x.n > 0)
    throw infinite_bars_unsupported("persistence image needs a barcode with no unbounded bars");
}

}  // namespace

Eigen::VectorXd persistence_image_loss::value(const ordered_barcode& x) const {
  require_bounded(x);
  const int res = spec_.resolution;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(res * res);
  for (int i = 0; i < x.m; ++i) {
    const double b = x.birth(i), c = x.death(i) - x.birth(i);
    if (c <= 0) continue;
    const double w = omega_(c);
    const axis_masses mx = axis_integrals(spec_.x0, spec_.x1, res, b, spec_.sigma);
    const axis_masses my = axis_integrals(spec_.y0, spec_.y1, res, c, spec_.sigma);
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix) out[iy * res + ix] += w * mx.mass[ix] * my.mass[iy];
  }
  return out;
}

Eigen::MatrixXd persistence_image_loss::grad(const ordered_barcode& x) const {
  require_bounded(x);
  const int res = spec_.resolution;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(res * res, x.dim());
  for (int i = 0; i < x.m; ++i) {
    const double b = x.birth(i), c = x.death(i) - x.birth(i);
    if (c <= 0) continue;
    const double w = omega_(c), wp = omega_.derivative(c);
    const axis_masses mx = axis_integrals(spec_.x0, spec_.x1, res, b, spec_.sigma);
    const axis_masses my = axis_integrals(spec_.y0, spec_.y1, res, c, spec_.sigma);
    for (int iy = 0; iy < res; ++iy) {
      for (int ix = 0; ix < res; ++ix) {
        const int cell = iy * res + ix;
        const double mass = mx.mass[ix] * my.mass[iy];
        const double d_db = -wp * mass + w * mx.dmass[ix] * my.mass[iy] - w * mx.mass[ix] * my.dmass[iy];
        const double d_dd = wp * mass + w * mx.mass[ix] * my.dmass[iy];
        g(cell, 2 * i) += d_db;
        g(cell, 2 * i + 1) += d_dd;
      }
    }
  }
  return g;
}

bool persistence_image_loss::smooth_at(const ordered_barcode& x) const {
  require_bounded(x);
  // the weighting vanishes to first order at the diagonal, so crossing it is
  // C^1; nothing else can kink
  return true;
}

// ---- linear representation -----------------------------------------------------

linear_representation_loss::linear_representation_loss(planar_map phi, line_map psi,
                                                       weighting_function omega)
    : phi_(std::move(phi)), psi_(std::move(psi)), omega_(omega) {
  if (phi_.k < 1 || !phi_.value || !phi_.jacobian)
    throw shape_error("planar map needs value and jacobian");
  if (psi_.k != phi_.k || !psi_.value || !psi_.derivative)
    throw shape_error("line map needs value and derivative of matching size");
}

Eigen::VectorXd linear_representation_loss::value(const ordered_barcode& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi_.k);
  for (int i = 0; i < x.m; ++i) {
    const double b = x.birth(i), d = x.death(i);
    if (b >= d) continue;
    Eigen::VectorXd pv = phi_.value(b, d);
    if (pv.size() != phi_.k) throw shape_error("planar map returned wrong size");
    out += omega_(d - b) * pv;
  }
  for (int j = 0; j < x.n; ++j) {
    Eigen::VectorXd lv = psi_.value(x.unbounded(j));
    if (lv.size() != psi_.k) throw shape_error("line map returned wrong size");
    out += lv;
  }
  return out;
}

Eigen::MatrixXd linear_representation_loss::grad(const ordered_barcode& x) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(phi_.k, x.dim());
  for (int i = 0; i < x.m; ++i) {
    const double b = x.birth(i), d = x.death(i);
    if (b >= d) continue;
    const double w = omega_(d - b), wp = omega_.derivative(d - b);
    const Eigen::VectorXd pv = phi_.value(b, d);
    const Eigen::MatrixXd pj = phi_.jacobian(b, d);
    if (pj.rows() != phi_.k || pj.cols() != 2)
      throw shape_error("planar map returned wrong jacobian shape");
    g.col(2 * i) = -wp * pv + w * pj.col(0);
    g.col(2 * i + 1) = wp * pv + w * pj.col(1);
  }
  for (int j = 0; j < x.n; ++j) g.col(2 * x.m + j) = psi_.derivative(x.unbounded(j));
  return g;
}

bool linear_representation_loss::smooth_at(const ordered_barcode& x) const {
  for (int i = 0; i < x.m; ++i) {
    if (x.birth(i) >= x.death(i)) continue;
    if (phi_.smooth && !phi_.smooth(x.birth(i), x.death(i))) return false;
  }
  for (int j = 0; j < x.n; ++j)
    if (psi_.smooth && !psi_.smooth(x.unbounded(j))) return false;
  return true;
}

// ---- bottleneck to a target ----------------------------------------------------

namespace {

// one way the bottleneck value can be attained
struct generator {
  int kind;  // 0 pair, 1 x-bar to diagonal, 2 target bar to diagonal, 3 unbounded pair
  int i = -1;  // pair-slot index (kinds 0,1), v-slot index (kind 3), target index (kind 2)
  int j = -1;  // target index (kind 0)
  double c = 0;
  double partner = 0;  // matched value for signs (kinds 0 use endpoints directly)
};

bool generator_before(const generator& a, const generator& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

}  // namespace

struct bottleneck_loss::analysis {
  double value = 0;
  Eigen::VectorXd grad;
  bool smooth = false;
  double margin = 0;
};

bottleneck_loss::bottleneck_loss(barcode target) : target_(std::move(target)) {
  target_.canonicalize();
}

bottleneck_loss::analysis bottleneck_loss::analyze(const ordered_barcode& x) const {
  analysis a;
  a.grad = Eigen::VectorXd::Zero(x.dim());
  if (static_cast<int>(target_.infinite_births.size()) != x.n) {
    a.value = kInf;
    return a;
  }

  const kept_slots kept = keep_above_diagonal(x);
  barcode qx;
  qx.finite = kept.pts;
  for (int j = 0; j < x.n; ++j) qx.infinite_births.push_back(x.unbounded(j));
  a.value = bottleneck(qx, target_);

  std::vector<generator> gens;
  for (size_t ki = 0; ki < kept.pts.size(); ++ki) {
    for (size_t j = 0; j < target_.finite.size(); ++j)
      gens.push_back({0, static_cast<int>(ki), static_cast<int>(j),
                      linf_dist(kept.pts[ki], target_.finite[j]), 0});
    gens.push_back({1, static_cast<int>(ki), -1,
                    (kept.pts[ki].second - kept.pts[ki].first) / 2, 0});
  }
  for (size_t j = 0; j < target_.finite.size(); ++j)
    gens.push_back({2, static_cast<int>(j), -1,
                    (target_.finite[j].second - target_.finite[j].first) / 2, 0});
  if (x.n > 0) {
    std::vector<int> vslots(x.n);
    std::iota(vslots.begin(), vslots.end(), 0);
    std::sort(vslots.begin(), vslots.end(), [&](int p, int q) {
      if (x.unbounded(p) != x.unbounded(q)) return x.unbounded(p) < x.unbounded(q);
      return p < q;
    });
    for (int k = 0; k < x.n; ++k) {
      const double v = x.unbounded(vslots[k]), t = target_.infinite_births[k];
      gens.push_back({3, vslots[k], -1, std::abs(v - t), t});
    }
  }
  std::sort(gens.begin(), gens.end(), generator_before);

  if (a.value <= kTieTol) {
    a.smooth = false;
    a.margin = 0;
    return a;
  }

  std::vector<const generator*> critical;
  std::vector<double> gaps;
  for (const auto& g : gens) {
    const double gap = std::abs(g.c - a.value);
    gaps.push_back(gap);
    if (gap <= kTieTol) critical.push_back(&g);
  }
  std::sort(gaps.begin(), gaps.end());
  a.margin = gaps.size() > 1 ? gaps[1] : kInf;

  const generator& g = *critical.front();
  a.smooth = critical.size() == 1 && g.kind != 2;
  if (g.kind == 0) {
    const int slot = kept.slot[g.i];
    const auto& p = kept.pts[g.i];
    const auto& t = target_.finite[g.j];
    const double ab = std::abs(p.first - t.first), ad = std::abs(p.second - t.second);
    a.margin = std::min(a.margin, std::abs(ab - ad));
    if (std::abs(ab - ad) <= kTieTol) a.smooth = false;
    if (ab >= ad)
      a.grad[2 * slot] = p.first > t.first ? 1.0 : -1.0;
    else
      a.grad[2 * slot + 1] = p.second > t.second ? 1.0 : -1.0;
  } else if (g.kind == 1) {
    const int slot = kept.slot[g.i];
    a.grad[2 * slot] = -0.5;
    a.grad[2 * slot + 1] = 0.5;
  } else if (g.kind == 3) {
    const double v = x.unbounded(g.i);
    a.grad[2 * x.m + g.i] = v > g.partner ? 1.0 : -1.0;
  }
  // kind 2 keeps the zero subgradient: only the target bar moved
  return a;
}

Eigen::VectorXd bottleneck_loss::value(const ordered_barcode& x) const {
  Eigen::VectorXd out(1);
  out[0] = analyze(x).value;
  return out;
}

Eigen::MatrixXd bottleneck_loss::grad(const ordered_barcode& x) const {
  return analyze(x).grad.transpose();
}

bool bottleneck_loss::smooth_at(const ordered_barcode& x) const { return analyze(x).smooth; }

double bottleneck_loss::tie_margin(const ordered_barcode& x) const { return analyze(x).margin; }

// ---- wasserstein to a target ----------------------------------------------------

struct wasserstein_loss::analysis {
  double value = 0;
  Eigen::VectorXd grad;
  bool smooth = true;
  double margin = kInf;
};

wasserstein_loss::wasserstein_loss(barcode target, double q) : target_(std::move(target)), q_(q) {
  if (!(q_ > 0)) throw bad_exponent("wasserstein exponent must be positive");
  target_.canonicalize();
}

wasserstein_loss::analysis wasserstein_loss::analyze(const ordered_barcode& x) const {
  analysis a;
  a.grad = Eigen::VectorXd::Zero(x.dim());
  if (static_cast<int>(target_.infinite_births.size()) != x.n) {
    a.value = kInf;
    a.smooth = false;
    return a;
  }

  const kept_slots kept = keep_above_diagonal(x);
  const int n1 = static_cast<int>(kept.pts.size());
  const int n2 = static_cast<int>(target_.finite.size());
  const int n = n1 + n2;

  double total = 0;

  // infinite part: monotone pairing of sorted births
  std::vector<int> vslots(x.n);
  std::iota(vslots.begin(), vslots.end(), 0);
  std::sort(vslots.begin(), vslots.end(), [&](int p, int q) {
    if (x.unbounded(p) != x.unbounded(q)) return x.unbounded(p) < x.unbounded(q);
    return p < q;
  });
  for (int k = 0; k < x.n; ++k)
    total += qpow(std::abs(x.unbounded(vslots[k]) - target_.infinite_births[k]), q_);
  for (int k = 0; k + 1 < x.n; ++k) {
    const bool x_tie =
        std::abs(x.unbounded(vslots[k]) - x.unbounded(vslots[k + 1])) <= kTieTol;
    const bool t_tie =
        std::abs(target_.infinite_births[k] - target_.infinite_births[k + 1]) <= kTieTol;
    if (x_tie != t_tie) a.smooth = false;  // matching can rewire under perturbation
  }

  std::vector<std::vector<double>> cost;
  std::vector<int> assignment;
  if (n > 0) {
    cost.assign(n, std::vector<double>(n, 0));
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        cost[i][j] = qpow(linf_dist(kept.pts[i], target_.finite[j]), q_);
    for (int i = 0; i < n1; ++i) {
      const double h = (kept.pts[i].second - kept.pts[i].first) / 2;
      for (int j = n2; j < n; ++j) cost[i][j] = qpow(h, q_);
    }
    for (int j = 0; j < n2; ++j) {
      const double h = (target_.finite[j].second - target_.finite[j].first) / 2;
      for (int i = n1; i < n; ++i) cost[i][j] = qpow(h, q_);
    }
    assignment = detail::solve_assignment(cost);
    for (int i = 0; i < n; ++i) total += cost[i][assignment[i]];
  }

  a.value = q_ == 1.0 ? total : std::pow(total, 1.0 / q_);
  if (a.value <= kTieTol) {
    a.smooth = false;
    a.margin = 0;
    a.grad.setZero();
    return a;
  }
  const double factor = q_ == 1.0 ? 1.0 : std::pow(a.value, 1.0 - q_);

  // gradient through the frozen matching
  for (int i = 0; i < n1; ++i) {
    const int slot = kept.slot[i];
    const int col = n > 0 ? assignment[i] : -1;
    if (col >= 0 && col < n2) {
      const auto& p = kept.pts[i];
      const auto& t = target_.finite[col];
      const double ab = std::abs(p.first - t.first), ad = std::abs(p.second - t.second);
      const double c = std::max(ab, ad);
      if (c <= kZeroCost) {
        if (q_ <= 1.0 + 1e-12) a.smooth = false;  // |.|^q kink at zero cost
        continue;
      }
      a.margin = std::min(a.margin, std::abs(ab - ad));
      if (std::abs(ab - ad) <= kTieTol) a.smooth = false;
      const double scale = factor * (q_ == 1.0 ? 1.0 : std::pow(c, q_ - 1.0));
      if (ab >= ad)
        a.grad[2 * slot] += scale * (p.first > t.first ? 1.0 : -1.0);
      else
        a.grad[2 * slot + 1] += scale * (p.second > t.second ? 1.0 : -1.0);
    } else {
      const double c = (kept.pts[i].second - kept.pts[i].first) / 2;
      if (c <= kZeroCost) {
        if (q_ <= 1.0 + 1e-12) a.smooth = false;
        continue;
      }
      const double scale = factor * (q_ == 1.0 ? 1.0 : std::pow(c, q_ - 1.0));
      a.grad[2 * slot] += scale * -0.5;
      a.grad[2 * slot + 1] += scale * 0.5;
    }
  }
  for (int k = 0; k < x.n; ++k) {
    const double v = x.unbounded(vslots[k]), t = target_.infinite_births[k];
    const double c = std::abs(v - t);
    if (c <= kZeroCost) {
      if (q_ <= 1.0 + 1e-12) a.smooth = false;
      continue;
    }
    a.grad[2 * x.m + vslots[k]] +=
        factor * (q_ == 1.0 ? 1.0 : std::pow(c, q_ - 1.0)) * (v > t ? 1.0 : -1.0);
  }

  // two-swap ties that rewire a real point make the frozen matching ambiguous
  if (n > 0) {
    auto effective = [&](int col) { return col < n2 ? col : -1; };
    for (int r1 = 0; r1 < n; ++r1) {
      for (int r2 = r1 + 1; r2 < n; ++r2) {
        const int c1 = assignment[r1], c2 = assignment[r2];
        if (effective(c1) == effective(c2)) continue;
        if (r1 >= n1 && r2 >= n1) continue;  // only diagonal slots move: gradient-neutral
        const double delta = cost[r1][c2] + cost[r2][c1] - cost[r1][c1] - cost[r2][c2];
        a.margin = std::min(a.margin, std::max(delta, 0.0));
        if (delta <= kTieTol) a.smooth = false;
      }
    }
  }
  return a;
}

Eigen::VectorXd wasserstein_loss::value(const ordered_barcode& x) const {
  Eigen::VectorXd out(1);
  out[0] = analyze(x).value;
  return out;
}

Eigen::MatrixXd wasserstein_loss::grad(const ordered_barcode& x) const {
  return analyze(x).grad.transpose();
}

bool wasserstein_loss::smooth_at(const ordered_barcode& x) const { return analyze(x).smooth; }

double wasserstein_loss::tie_margin(const ordered_barcode& x) const { return analyze(x).margin; }

}  // namespace diffbar
