#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "diffbar/losses.hpp"
#include "diffbar/optimizer.hpp"
#include "diffbar/parametrizations.hpp"
#include "diffbar/persistence.hpp"

namespace diffbar {

// rank of the map H_p(K^s) -> H_p(K^t) induced by inclusion, computed
// directly from cycle and boundary spaces over GF(2) with bitmask columns.
// independent of the reduction pairing. throws oracle_too_large beyond 64
// simplices, shape_error when s > t.
int rank_oracle(const filter_function& f, int degree, double s, double t);

struct check_report {
  bool passed = true;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    passed = false;
    failures.push_back(std::move(msg));
  }
};

// db(Dgm f, Dgm g) <= ||f - g||_inf in every degree (f, g on one complex)
check_report stability_check(const filter_function& f, const filter_function& g);

// coercivity db >= min(||f-g||_inf, max(gap radii)) when f and g share a
// stratum (no simplex pair ordered oppositely); equality db = ||f-g||_inf
// whenever g lies inside f's gap radius ball
check_report local_isometry_check(const filter_function& f, const filter_function& g);

// two perturbations in the third-of-radius ball of f compare isometrically
check_report local_isometry_check(const filter_function& f, const filter_function& g,
                                  const filter_function& h);

// analytic chain-rule gradient against central differences at h = 1e-6,
// entrywise relative tolerance 1e-5 (absolute floor 1e-7). evaluations are
// retracted first so constrained families stay in their domain.
check_report gradient_check(const parametrization& family, const Eigen::VectorXd& theta,
                            int degree, const loss_on_barcodes& loss,
                            retraction_kind retract = retraction_kind::none);

// randomized corpora ------------------------------------------------------

// closure of random edges (and sometimes one triangle) on up to 4 vertices,
// resampled until at most max_simplices simplices
simplicial_complex random_small_complex(std::mt19937_64& rng, int max_simplices = 8);

// vertex values i.i.d. uniform, higher simplices take their running face max
// plus a positive jitter; monotone by construction
std::vector<double> random_monotone_values(const simplicial_complex& k, std::mt19937_64& rng);

// deterministic per-instance generator: one stream per (seed, index)
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index);

// thread count: explicit argument wins, then BARCODE_GRAD_THREADS, then
// hardware concurrency
int resolve_threads(int max_threads);

// runs fn(0..count-1) on worker threads; callers aggregate by index so
// results never depend on scheduling
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct suite_report {
  bool passed = true;
  int instances = 0;
  std::vector<std::string> failures;
  double seconds = 0;
};

// reduction ranks against the GF(2) oracle on random filtered complexes, all
// (s, t) threshold pairs from the value set, every degree
suite_report run_oracle_suite(std::uint64_t seed, int instances, int max_threads = 0);

// diagram stability on random filter pairs sharing a complex
suite_report run_stability_suite(std::uint64_t seed, int instances, int max_threads = 0);

// gap-radius ball isometry, coercivity, and the two-perturbation comparison
suite_report run_isometry_suite(std::uint64_t seed, int instances, int max_threads = 0);

// every parametrization family composed with every loss family; each combo
// gets `instances` generic random instances with margins wide enough for
// finite differences
suite_report run_gradient_suite(std::uint64_t seed, int instances, int max_threads = 0);

}  // namespace diffbar
