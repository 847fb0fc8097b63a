#pragma once

#include <vector>

#include "diffbar/barcode.hpp"
#include "diffbar/complex.hpp"

namespace diffbar {

// canonical filtration-compatible total order: ascending filter value, ties
// broken by dimension, then lexicographically on vertices. returns position ->
// simplex index.
std::vector<int> filtration_order(const filter_function& f);

// outcome of boundary-matrix column reduction over GF(2). a simplex is
// positive when its reduced column vanishes (it creates a cycle); a negative
// simplex kills the cycle created by its partner.
struct reduction_certificate {
  std::vector<int> order;     // position -> simplex index
  std::vector<int> position;  // simplex index -> position
  std::vector<char> positive; // per simplex index
  std::vector<int> partner;   // simplex index -> paired simplex index, -1 if none
};

// order must be a filtration-compatible total order on all of k (faces before
// cofaces); throws order_violation otherwise.
reduction_certificate reduce(const simplicial_complex& k, const std::vector<int>& order);

// degree-p sublevel-set diagram of f. pairs with equal endpoint values fall on
// the diagonal and are dropped. throws bad_degree unless 0 <= p <= dim k.
barcode diagram(const filter_function& f, int degree);

// combinatorial recipe behind a diagram: which simplex pair realizes each
// finite bar, which simplex births each unbounded one. pairs are sorted by the
// death simplex index, unpaired entries by simplex index; this fixed reading
// order is shared by lifts and the global lift.
struct barcode_template {
  int degree = 0;
  std::vector<std::pair<int, int>> pairs;  // (birth simplex, death simplex)
  std::vector<int> unpaired;

  int pair_count() const { return static_cast<int>(pairs.size()); }
  int unpaired_count() const { return static_cast<int>(unpaired.size()); }
  bool operator==(const barcode_template& o) const {
    return degree == o.degree && pairs == o.pairs && unpaired == o.unpaired;
  }
};

barcode_template build_barcode_template(const filter_function& f, int degree);

// templates for every degree 0..dim k. the classes partition the simplices:
// sum over p of (2*m_p + n_p) equals the size of k.
struct total_barcode_template {
  std::vector<barcode_template> by_degree;

  int pair_count(int p) const { return by_degree[p].pair_count(); }
  int unpaired_count(int p) const { return by_degree[p].unpaired_count(); }
};

total_barcode_template build_total_template(const filter_function& f);

// evaluate a template on any ordering-equivalent filter: slot values are the
// filter values of the template's simplices, in the template reading order.
ordered_barcode realize_template(const barcode_template& t, const filter_function& f);

// global lift: one ordered barcode per degree, whose concatenated coordinates
// are a fixed permutation of the filter values. the permutation depends only
// on the ordering class of f.
struct global_lift {
  std::vector<ordered_barcode> per_degree;
  std::vector<int> slot_to_simplex;  // concatenated slot -> canonical simplex index
};

global_lift perm_lift(const filter_function& f);

}  // namespace diffbar
