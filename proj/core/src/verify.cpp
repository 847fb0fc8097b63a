#include "diffbar/verify.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "diffbar/barcode_space.hpp"
#include "diffbar/differential.hpp"
#include "diffbar/errors.hpp"

namespace diffbar {

// ---- exact rank oracle ---------------------------------------------------------

namespace {

int gf2_rank(const std::vector<std::uint64_t>& vecs) {
  std::uint64_t basis[64] = {0};
  int rank = 0;
  for (std::uint64_t v : vecs) {
    while (v) {
      const int b = std::bit_width(v) - 1;
      if (!basis[b]) {
        basis[b] = v;
        ++rank;
        break;
      }
      v ^= basis[b];
    }
  }
  return rank;
}

}  // namespace

int rank_oracle(const filter_function& f, int degree, double s, double t) {
  if (s > t) throw shape_error("oracle needs s <= t");
  const simplicial_complex& k = f.complex();
  if (k.size() > 64) throw oracle_too_large("oracle limited to 64 simplices");
  if (degree < 0 || degree > k.dimension()) throw bad_degree("oracle degree outside complex");

  // degree-p simplices of the sublevel complex at t, with dense positions
  std::vector<int> tp;
  std::vector<int> pos(k.size(), -1);
  for (int i = 0; i < k.size(); ++i) {
    if (k.at(i).dimension() == degree && f[i] <= t) {
      pos[i] = static_cast<int>(tp.size());
      tp.push_back(i);
    }
  }

  // cycle space of the sublevel complex at s, expressed over tp positions.
  // boundary columns use global simplex indices as row bits; trackers record
  // the column combination that produced each vector.
  std::vector<std::uint64_t> cycles;
  {
    std::uint64_t col_basis[64] = {0};
    std::uint64_t trk_basis[64] = {0};
    for (int i : tp) {
      if (f[i] > s) continue;
      std::uint64_t col = 0;
      for (int face : k.facets(i)) col |= std::uint64_t{1} << face;
      std::uint64_t trk = std::uint64_t{1} << pos[i];
      while (col) {
        const int b = std::bit_width(col) - 1;
        if (!col_basis[b]) {
          col_basis[b] = col;
          trk_basis[b] = trk;
          trk = 0;  // became a pivot, not a cycle
          break;
        }
        col ^= col_basis[b];
        trk ^= trk_basis[b];
      }
      if (!col && trk) cycles.push_back(trk);
    }
  }

  // boundary space at t in the same coordinates
  std::vector<std::uint64_t> boundaries;
  for (int i = 0; i < k.size(); ++i) {
    if (k.at(i).dimension() != degree + 1 || f[i] > t) continue;
    std::uint64_t col = 0;
    for (int face : k.facets(i)) col |= std::uint64_t{1} << pos[face];
    boundaries.push_back(col);
  }

  // rank of the induced map: dim((Z + B) / B)
  std::vector<std::uint64_t> joint = boundaries;
  joint.insert(joint.end(), cycles.begin(), cycles.end());
  return gf2_rank(joint) - gf2_rank(boundaries);
}

// ---- metric checks -------------------------------------------------------------

namespace {

constexpr double kMetricTol = 1e-9;

double sup_dist(const filter_function& f, const filter_function& g) {
  double sup = 0;
  for (int i = 0; i < f.size(); ++i) sup = std::max(sup, std::abs(f[i] - g[i]));
  return sup;
}

// diagrams compare degree by degree; the distance takes the worst one
double diagram_distance(const filter_function& f, const filter_function& g) {
  double worst = 0;
  for (int p = 0; p <= f.complex().dimension(); ++p)
    worst = std::max(worst, bottleneck(diagram(f, p), diagram(g, p)));
  return worst;
}

void require_shared_complex(const filter_function& f, const filter_function& g) {
  if (&f.complex() != &g.complex() && f.size() != g.size())
    throw shape_error("filters live on different complexes");
}

// both lie in the closure of one top-dimensional stratum: no simplex pair is
// strictly ordered one way by f and the other way by g
bool common_stratum(const filter_function& f, const filter_function& g) {
  for (int i = 0; i < f.size(); ++i)
    for (int j = i + 1; j < f.size(); ++j) {
      const double df = f[i] - f[j], dg = g[i] - g[j];
      if ((df > 0 && dg < 0) || (df < 0 && dg > 0)) return false;
    }
  return true;
}

}  // namespace

check_report stability_check(const filter_function& f, const filter_function& g) {
  require_shared_complex(f, g);
  check_report r;
  const double sup = sup_dist(f, g);
  for (int p = 0; p <= f.complex().dimension(); ++p) {
    const double db = bottleneck(diagram(f, p), diagram(g, p));
    if (db > sup + kMetricTol) {
      std::ostringstream msg;
      msg << "degree " << p << ": bottleneck " << db << " exceeds sup distance " << sup;
      r.fail(msg.str());
    }
  }
  return r;
}

check_report local_isometry_check(const filter_function& f, const filter_function& g) {
  require_shared_complex(f, g);
  check_report r;
  const double sup = sup_dist(f, g);
  const double db = diagram_distance(f, g);
  const double rad_f = gap_radius(f), rad_g = gap_radius(g);

  if (db > sup + kMetricTol) {
    std::ostringstream msg;
    msg << "stability violated: bottleneck " << db << " > sup " << sup;
    r.fail(msg.str());
  }
  // the lower bound needs a stratum shared by f and g; a permuted filter can
  // reproduce the same diagram from far away
  if (common_stratum(f, g)) {
    const double floor = std::min(sup, std::max(rad_f, rad_g));
    if (db + kMetricTol < floor) {
      std::ostringstream msg;
      msg << "coercivity violated: bottleneck " << db << " below floor " << floor;
      r.fail(msg.str());
    }
  }
  if (sup <= rad_f && std::abs(db - sup) > kMetricTol) {
    std::ostringstream msg;
    msg << "isometry violated inside gap ball: bottleneck " << db << " vs sup " << sup;
    r.fail(msg.str());
  }
  return r;
}

check_report local_isometry_check(const filter_function& f, const filter_function& g,
                                  const filter_function& h) {
  require_shared_complex(f, g);
  require_shared_complex(f, h);
  check_report r;
  const double rad = gap_radius(f);
  if (sup_dist(f, g) > rad / 3 + kMetricTol || sup_dist(f, h) > rad / 3 + kMetricTol) {
    r.fail("perturbations leave the third-of-radius ball");
    return r;
  }
  const double sup = sup_dist(g, h);
  const double db = diagram_distance(g, h);
  if (std::abs(db - sup) > kMetricTol) {
    std::ostringstream msg;
    msg << "two-perturbation isometry violated: bottleneck " << db << " vs sup " << sup;
    r.fail(msg.str());
  }
  return r;
}

// ---- gradient check ------------------------------------------------------------

check_report gradient_check(const parametrization& family, const Eigen::VectorXd& theta,
                            int degree, const loss_on_barcodes& loss, retraction_kind retract) {
  check_report r;
  Eigen::MatrixXd analytic;
  try {
    const lift l = build_lift(family, theta, degree);
    const Eigen::MatrixXd bd = differential(l, family, theta);
    const ordered_barcode x = l.evaluate(family.value(theta));
    analytic = loss.grad(x) * bd;
  } catch (const singular_parameter& e) {
    r.fail(std::string("base point is singular: ") + e.what());
    return r;
  }

  const double h = 1e-6;
  auto loss_at = [&](const Eigen::VectorXd& point) {
    const Eigen::VectorXd at = retract_point(retract, family, point);
    return loss.value(to_ordered(diagram(family.value(at), degree)));
  };
  for (int i = 0; i < family.param_dim(); ++i) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(family.param_dim());
    step[i] = h;
    const Eigen::VectorXd fd = (loss_at(theta + step) - loss_at(theta - step)) / (2 * h);
    for (int row = 0; row < loss.output_dim(); ++row) {
      const double a = analytic(row, i), b = fd[row];
      const double tol = std::max(1e-5 * std::max(std::abs(a), std::abs(b)), 1e-7);
      if (std::abs(a - b) > tol) {
        std::ostringstream msg;
        msg << "component (" << row << ", " << i << "): analytic " << a
            << " vs finite difference " << b;
        r.fail(msg.str());
      }
    }
  }
  return r;
}

// ---- random corpora ------------------------------------------------------------

simplicial_complex random_small_complex(std::mt19937_64& rng, int max_simplices) {
  std::uniform_int_distribution<int> nv(1, 4);
  std::bernoulli_distribution edge(0.5), tri(0.3);
  for (;;) {
    const int v = nv(rng);
    std::vector<std::vector<vertex_id>> gens;
    for (int i = 0; i < v; ++i) gens.push_back({i});
    for (int i = 0; i < v; ++i)
      for (int j = i + 1; j < v; ++j)
        if (edge(rng)) gens.push_back({i, j});
    if (v >= 3 && tri(rng)) {
      std::vector<std::vector<vertex_id>> triples;
      for (int a = 0; a < v; ++a)
        for (int b = a + 1; b < v; ++b)
          for (int c = b + 1; c < v; ++c) triples.push_back({a, b, c});
      std::uniform_int_distribution<int> pick(0, static_cast<int>(triples.size()) - 1);
      gens.push_back(triples[pick(rng)]);
    }
    simplicial_complex k = simplicial_complex::build(gens);
    if (k.size() <= max_simplices) return k;
  }
}

std::vector<double> random_monotone_values(const simplicial_complex& k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> base(0.0, 1.0), jitter(0.01, 0.3);
  std::vector<double> vals(k.size());
  for (int s = 0; s < k.size(); ++s) {
    if (k.at(s).dimension() == 0) {
      vals[s] = base(rng);
    } else {
      double floor = 0;
      for (int face : k.facets(s)) floor = std::max(floor, vals[face]);
      vals[s] = floor + jitter(rng);
    }
  }
  return vals;
}

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

int resolve_threads(int max_threads) {
  if (max_threads > 0) return max_threads;
  if (const char* env = std::getenv("BARCODE_GRAD_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---- suites ---------------------------------------------------------------------

namespace {

suite_report gather(int count, int max_threads,
                    const std::function<void(int, std::vector<std::string>&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<std::string>> per(count);
  parallel_for(count, resolve_threads(max_threads), [&](int i) {
    try {
      body(i, per[i]);
    } catch (const std::exception& e) {
      per[i].push_back("instance " + std::to_string(i) + " threw: " + e.what());
    }
  });
  suite_report rep;
  rep.instances = count;
  for (const auto& msgs : per)
    for (const auto& msg : msgs) rep.failures.push_back(msg);
  rep.passed = rep.failures.empty();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

int bars_alive(const barcode& d, double s, double t) {
  int count = 0;
  for (const auto& [b, death] : d.finite)
    if (b <= s && death > t) ++count;
  for (double b : d.infinite_births)
    if (b <= s) ++count;
  return count;
}

}  // namespace

suite_report run_oracle_suite(std::uint64_t seed, int instances, int max_threads) {
  return gather(instances, max_threads, [seed](int i, std::vector<std::string>& failures) {
    std::mt19937_64 rng = instance_rng(seed, i);
    const simplicial_complex k = random_small_complex(rng);
    const filter_function f(k, random_monotone_values(k, rng));

    std::vector<double> levels = f.values();
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    for (int p = 0; p <= k.dimension(); ++p) {
      const barcode d = diagram(f, p);
      for (size_t si = 0; si < levels.size(); ++si) {
        for (size_t ti = si; ti < levels.size(); ++ti) {
          const int expected = rank_oracle(f, p, levels[si], levels[ti]);
          const int got = bars_alive(d, levels[si], levels[ti]);
          if (expected != got) {
            std::ostringstream msg;
            msg << "instance " << i << " degree " << p << " (s,t)=(" << levels[si] << ","
                << levels[ti] << "): oracle " << expected << " vs bars " << got;
            failures.push_back(msg.str());
          }
        }
      }
    }
  });
}

suite_report run_stability_suite(std::uint64_t seed, int instances, int max_threads) {
  return gather(instances, max_threads, [seed](int i, std::vector<std::string>& failures) {
    std::mt19937_64 rng = instance_rng(seed, i);
    const simplicial_complex k = random_small_complex(rng);
    const filter_function f(k, random_monotone_values(k, rng));
    const filter_function g(k, random_monotone_values(k, rng));
    const check_report rep = stability_check(f, g);
    for (const auto& msg : rep.failures)
      failures.push_back("instance " + std::to_string(i) + ": " + msg);
  });
}

suite_report run_isometry_suite(std::uint64_t seed, int instances, int max_threads) {
  return gather(instances, max_threads, [seed](int i, std::vector<std::string>& failures) {
    std::mt19937_64 rng = instance_rng(seed, i);
    const simplicial_complex k = random_small_complex(rng);

    std::vector<double> vals;
    double rad = 0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      vals = random_monotone_values(k, rng);
      rad = gap_radius(filter_function(k, vals));
      if (rad > 1e-5) break;
    }
    if (rad <= 1e-5) {
      failures.push_back("instance " + std::to_string(i) + ": no usable filter found");
      return;
    }
    const filter_function f(k, vals);

    auto perturb = [&](double radius) {
      std::uniform_real_distribution<double> wiggle(-radius, radius);
      std::vector<double> out = vals;
      for (double& v : out) v += wiggle(rng);
      return filter_function(k, out);
    };

    const filter_function near = perturb(0.9 * rad);

    // same stratum as f but arbitrarily far: fresh sorted values laid out
    // along f's filtration order (faces first, so still monotone)
    std::vector<double> fresh(k.size());
    {
      std::uniform_real_distribution<double> base(0.0, 2.0);
      for (double& v : fresh) v = base(rng);
      std::sort(fresh.begin(), fresh.end());
      std::vector<double> arranged(k.size());
      const std::vector<int> order = filtration_order(f);
      for (int pos = 0; pos < k.size(); ++pos) arranged[order[pos]] = fresh[pos];
      fresh = std::move(arranged);
    }
    const filter_function far(k, fresh);
    const filter_function third_a = perturb(0.3 * rad);
    const filter_function third_b = perturb(0.3 * rad);

    for (const auto& msg : local_isometry_check(f, near).failures)
      failures.push_back("instance " + std::to_string(i) + " (near): " + msg);
    for (const auto& msg : local_isometry_check(f, far).failures)
      failures.push_back("instance " + std::to_string(i) + " (far): " + msg);
    for (const auto& msg : local_isometry_check(f, third_a, third_b).failures)
      failures.push_back("instance " + std::to_string(i) + " (pair): " + msg);
  });
}

// ---- gradient suite -------------------------------------------------------------

namespace {

enum class family_kind { height, lower_star, rips, ellipsoid, raw };
enum class loss_kind { total, image, linear, bottleneck_to, wasserstein_to };

constexpr family_kind kFamilies[] = {family_kind::height, family_kind::lower_star,
                                     family_kind::rips, family_kind::ellipsoid, family_kind::raw};
constexpr loss_kind kLosses[] = {loss_kind::total, loss_kind::image, loss_kind::linear,
                                 loss_kind::bottleneck_to, loss_kind::wasserstein_to};

const char* family_name(family_kind f) {
  switch (f) {
    case family_kind::height: return "height";
    case family_kind::lower_star: return "lower_star";
    case family_kind::rips: return "rips";
    case family_kind::ellipsoid: return "ellipsoid_rips";
    case family_kind::raw: return "raw_filter";
  }
  return "?";
}

const char* loss_name(loss_kind l) {
  switch (l) {
    case loss_kind::total: return "total_persistence";
    case loss_kind::image: return "persistence_image";
    case loss_kind::linear: return "linear_representation";
    case loss_kind::bottleneck_to: return "bottleneck_to";
    case loss_kind::wasserstein_to: return "wasserstein_to";
  }
  return "?";
}

simplicial_complex filled_triangle() { return simplicial_complex::build({{0, 1, 2}}); }

// cone over a 4-cycle (no base face): contractible, so no unbounded bar above
// degree 0, yet lower-star style filters get positive-length bars whenever the
// apex or a local min sticks out
simplicial_complex square_cone() {
  return simplicial_complex::build({{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {0, 3, 4}});
}

// smallest gap between value groups more than 1e-9 apart; exact structural
// ties do not count against the margin
double min_positive_gap(const std::vector<double>& values) {
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < v.size(); ++i) {
    const double gap = v[i] - v[i - 1];
    if (gap > 1e-9) best = std::min(best, gap);
  }
  return best;
}

// every surviving slot must sit clear of the diagonal; exactly-diagonal slots
// ride a shared branch and stay put, which is fine unless the loss kinks there
bool slot_margins_ok(const ordered_barcode& x, bool allow_structural_zero) {
  for (int i = 0; i < x.m; ++i) {
    const double pers = x.death(i) - x.birth(i);
    if (std::abs(pers) <= 1e-9) {
      if (!allow_structural_zero) return false;
    } else if (pers <= 1e-3 && pers > 0) {
      return false;
    }
  }
  return true;
}

struct gradient_instance {
  std::shared_ptr<parametrization> family;
  Eigen::VectorXd theta;
  int degree = 0;
  std::shared_ptr<loss_on_barcodes> loss;
  retraction_kind retract = retraction_kind::none;
};

// families need wide margins so the finite-difference probes never change any
// argmax or value ordering
bool family_margins_ok(const parametrization& fam, const Eigen::VectorXd& theta) {
  if (!fam.is_smooth_at(theta)) return false;
  return min_positive_gap(fam.value(theta).values()) > 1e-3;
}

bool make_family(family_kind kind, bool degree_one, std::mt19937_64& rng, gradient_instance& out) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  switch (kind) {
    case family_kind::height: {
      Eigen::MatrixXd coords(5, 2);
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 2; ++c) coords(r, c) = unit(rng);
      Eigen::VectorXd theta(2);
      theta << unit(rng), unit(rng);
      if (theta.norm() < 0.2) return false;
      theta.normalize();
      out.family = std::make_shared<height_parametrization>(square_cone(), coords);
      out.theta = theta;
      out.retract = retraction_kind::sphere;
      break;
    }
    case family_kind::lower_star: {
      Eigen::MatrixXd a(5, 3);
      Eigen::VectorXd c(5), theta(3);
      for (int r = 0; r < 5; ++r) {
        c[r] = unit(rng);
        for (int col = 0; col < 3; ++col) a(r, col) = unit(rng);
      }
      for (int r = 0; r < 3; ++r) theta[r] = unit(rng);
      out.family = std::make_shared<lower_star_parametrization>(
          square_cone(), std::make_shared<linear_vertex_field>(a, c));
      out.theta = theta;
      break;
    }
    case family_kind::rips: {
      Eigen::VectorXd theta(8);
      for (int i = 0; i < 8; ++i) theta[i] = 1.5 * unit(rng);
      out.family = std::make_shared<rips_parametrization>(4, 2, 2);
      out.theta = theta;
      break;
    }
    case family_kind::ellipsoid: {
      Eigen::MatrixXd pts(4, 2);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) pts(r, c) = 1.5 * unit(rng);
      for (int r = 0; r < 4; ++r)
        for (int r2 = r + 1; r2 < 4; ++r2)
          if ((pts.row(r) - pts.row(r2)).norm() < 0.2) return false;
      Eigen::VectorXd theta(12);
      std::uniform_real_distribution<double> bump(0.4, 1.0);
      for (int p = 0; p < 4; ++p) {
        Eigen::Matrix2d b;
        b << unit(rng), unit(rng), unit(rng), unit(rng);
        Eigen::Matrix2d a = b.transpose() * b + bump(rng) * Eigen::Matrix2d::Identity();
        theta[p * 3 + 0] = a(0, 0);
        theta[p * 3 + 1] = a(0, 1);
        theta[p * 3 + 2] = a(1, 1);
      }
      out.family = std::make_shared<ellipsoid_rips_parametrization>(pts, 2);
      out.theta = theta;
      break;
    }
    case family_kind::raw: {
      simplicial_complex k = degree_one ? filled_triangle() : random_small_complex(rng);
      const std::vector<double> vals = random_monotone_values(k, rng);
      out.family = std::make_shared<raw_filter_parametrization>(std::move(k));
      out.theta = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
      break;
    }
  }
  out.degree = degree_one ? 1 : 0;
  if (out.degree > out.family->complex().dimension()) return false;
  return family_margins_ok(*out.family, out.theta);
}

std::shared_ptr<loss_on_barcodes> make_loss(loss_kind kind, const barcode& at, int rep,
                                            std::mt19937_64& rng) {
  switch (kind) {
    case loss_kind::total:
      return std::make_shared<total_persistence_loss>();
    case loss_kind::image: {
      image_spec spec;
      spec.x0 = -2;
      spec.x1 = 8;
      spec.y0 = -2;
      spec.y1 = 8;
      spec.resolution = 3;
      spec.sigma = 0.4;
      return std::make_shared<persistence_image_loss>(
          spec, weighting_function(weighting_function::kind::smoothstep, 0.5));
    }
    case loss_kind::linear: {
      planar_map phi;
      phi.k = 2;
      phi.value = [](double b, double d) {
        Eigen::VectorXd v(2);
        v << std::sin(b) + d * d, b * d;
        return v;
      };
      phi.jacobian = [](double b, double d) {
        Eigen::MatrixXd j(2, 2);
        j << std::cos(b), 2 * d, d, b;
        return j;
      };
      line_map psi;
      psi.k = 2;
      psi.value = [](double v) {
        Eigen::VectorXd out(2);
        out << std::cos(v), v * v;
        return out;
      };
      psi.derivative = [](double v) {
        Eigen::VectorXd out(2);
        out << -std::sin(v), 2 * v;
        return out;
      };
      return std::make_shared<linear_representation_loss>(
          phi, psi, weighting_function(weighting_function::kind::smoothstep, 1.0));
    }
    case loss_kind::bottleneck_to:
    case loss_kind::wasserstein_to: {
      std::uniform_real_distribution<double> shift(-0.3, 0.3), lift_up(0.05, 0.5);
      barcode target;
      for (const auto& [b, d] : at.finite) {
        const double nb = b + shift(rng);
        double nd = d + lift_up(rng);
        if (nd <= nb) nd = nb + 0.1 + lift_up(rng);
        target.finite.emplace_back(nb, nd);
      }
      for (double v : at.infinite_births) target.infinite_births.push_back(v + shift(rng));
      if (kind == loss_kind::bottleneck_to) return std::make_shared<bottleneck_loss>(target);
      const double q = (rep % 2 == 0) ? 1.0 : 2.0;
      return std::make_shared<wasserstein_loss>(target, q);
    }
  }
  return nullptr;
}

bool has_positive_slot(const ordered_barcode& x) {
  for (int i = 0; i < x.m; ++i)
    if (x.death(i) - x.birth(i) > 1e-3) return true;
  return false;
}

// margins specific to each loss so h=1e-6 probes stay on one smooth branch.
// exactly-diagonal slots are fine everywhere: their contributions vanish
// identically along the branch on both the analytic and probed sides.
bool loss_margins_ok(loss_kind kind, const loss_on_barcodes& loss, const ordered_barcode& x) {
  if (!slot_margins_ok(x, true)) return false;
  switch (kind) {
    case loss_kind::total:
    case loss_kind::image:
      // a bar clear of the diagonal keeps the check from being vacuous
      return has_positive_slot(x);
    case loss_kind::linear:
      return true;
    case loss_kind::bottleneck_to: {
      const auto& bl = static_cast<const bottleneck_loss&>(loss);
      return loss.smooth_at(x) && bl.tie_margin(x) > 1e-4 && scalar_value(loss, x) > 1e-3;
    }
    case loss_kind::wasserstein_to: {
      // the value floor bounds the curvature of the q-root at the base point
      const auto& wl = static_cast<const wasserstein_loss&>(loss);
      return loss.smooth_at(x) && wl.tie_margin(x) > 1e-4 && scalar_value(loss, x) > 1e-2;
    }
  }
  return false;
}

bool build_gradient_instance(family_kind fk, loss_kind lk, int rep, std::mt19937_64& rng,
                             gradient_instance& out) {
  const bool degree_one = lk == loss_kind::image;
  for (int attempt = 0; attempt < 300; ++attempt) {
    gradient_instance inst;
    if (!make_family(fk, degree_one, rng, inst)) continue;
    lift l;
    try {
      l = build_lift(*inst.family, inst.theta, inst.degree);
    } catch (const singular_parameter&) {
      continue;
    }
    const ordered_barcode x = l.evaluate(inst.family->value(inst.theta));
    if (degree_one && x.n != 0) continue;
    inst.loss = make_loss(lk, quotient(x), rep, rng);
    if (!loss_margins_ok(lk, *inst.loss, x)) continue;
    out = std::move(inst);
    return true;
  }
  return false;
}

}  // namespace

suite_report run_gradient_suite(std::uint64_t seed, int instances, int max_threads) {
  const int combos = 25;
  return gather(combos * instances, max_threads,
                [seed, instances](int index, std::vector<std::string>& failures) {
    const int combo = index / instances;
    const int rep = index % instances;
    const family_kind fk = kFamilies[combo / 5];
    const loss_kind lk = kLosses[combo % 5];
    std::mt19937_64 rng = instance_rng(seed, index);

    gradient_instance inst;
    if (!build_gradient_instance(fk, lk, rep, rng, inst)) {
      std::ostringstream msg;
      msg << family_name(fk) << " x " << loss_name(lk) << " rep " << rep
          << ": no generic instance found";
      failures.push_back(msg.str());
      return;
    }
    const check_report rep_out =
        gradient_check(*inst.family, inst.theta, inst.degree, *inst.loss, inst.retract);
    for (const auto& msg : rep_out.failures) {
      std::ostringstream line;
      line << family_name(fk) << " x " << loss_name(lk) << " rep " << rep << ": " << msg;
      failures.push_back(line.str());
    }
  });
}

}  // namespace diffbar
