#pragma once

#include <vector>

#include "diffbar/barcode.hpp"

namespace diffbar {

// forget slot order; slots with birth >= death fall onto the diagonal and are
// dropped, so the map stays 1-Lipschitz from sup norm to bottleneck distance.
barcode quotient(const ordered_barcode& x);

// canonical pre-image: finite bars sorted by (birth, death) then unbounded
// births ascending.
ordered_barcode to_ordered(const barcode& d);

// partial matching achieving a metric value. -1 stands for the diagonal.
struct matching {
  std::vector<std::pair<int, int>> finite_pairs;    // (index in a.finite, index in b.finite)
  std::vector<std::pair<int, int>> infinite_pairs;  // sorted-birth pairing
};

struct bottleneck_result {
  double value = 0;
  matching match;  // meaningful only when value is finite
};

// sup-norm bottleneck distance; +inf iff unbounded-bar counts differ.
// unbounded bars match by sorted births at cost |birth difference|.
double bottleneck(const barcode& a, const barcode& b);
bottleneck_result bottleneck_with_matching(const barcode& a, const barcode& b);

struct wasserstein_result {
  double value = 0;
  matching match;
  bool exact = true;  // false for 0 < q < 1
};

// q-Wasserstein distance on diagrams, exact for q >= 1 via assignment on q-th
// power costs. throws bad_exponent for q <= 0.
wasserstein_result wasserstein(const barcode& a, const barcode& b, double q);

// witness that quotient contracts: db(Q(x), Q(y)) <= ||x - y||_inf. shapes of
// x and y must agree.
struct lipschitz_report {
  bool ok = false;
  double bottleneck_value = 0;
  double sup_norm = 0;
};

lipschitz_report lipschitz_check_quotient(const ordered_barcode& x, const ordered_barcode& y);

}  // namespace diffbar
