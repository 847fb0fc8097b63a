#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace diffbar {

// multiset of intervals: finite bars (birth < death) plus births of unbounded
// bars. the diagonal is implicit with infinite multiplicity.
struct barcode {
  std::vector<std::pair<double, double>> finite;
  std::vector<double> infinite_births;

  // sorts finite bars by (birth, death) and infinite births ascending
  void canonicalize();
  bool operator==(const barcode& o) const {
    return finite == o.finite && infinite_births == o.infinite_births;
  }
};

// point of R^{2m+n}: m (birth, death) slots, not constrained to lie above the
// diagonal, then n unbounded-birth slots. data layout: b_0, d_0, ..., b_{m-1},
// d_{m-1}, v_0, ..., v_{n-1}.
struct ordered_barcode {
  int m = 0;
  int n = 0;
  Eigen::VectorXd data;

  int dim() const { return 2 * m + n; }
  double birth(int i) const { return data[2 * i]; }
  double death(int i) const { return data[2 * i + 1]; }
  double unbounded(int j) const { return data[2 * m + j]; }
};

}  // namespace diffbar
