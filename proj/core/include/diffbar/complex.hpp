#pragma once

#include <map>
#include <vector>

#include "diffbar/errors.hpp"

namespace diffbar {

using vertex_id = int;

// vertices strictly increasing
struct simplex {
  std::vector<vertex_id> vertices;

  int dimension() const { return static_cast<int>(vertices.size()) - 1; }
  bool operator==(const simplex& o) const { return vertices == o.vertices; }
};

// canonical order: dimension first, then lexicographic on vertex ids
bool simplex_before(const simplex& a, const simplex& b);

class simplicial_complex {
 public:
  // closes the generators under taking faces, deduplicates, sorts canonically.
  // throws duplicate_simplex on a repeated vertex inside one generator,
  // empty_complex when nothing is left.
  static simplicial_complex build(const std::vector<std::vector<vertex_id>>& generators);

  int size() const { return static_cast<int>(simplices_.size()); }
  int dimension() const { return dim_; }
  const simplex& at(int i) const { return simplices_[i]; }
  // canonical indices of the codimension-1 faces of simplex i (empty for vertices)
  const std::vector<int>& facets(int i) const { return facets_[i]; }
  // -1 when absent; input need not be sorted
  int index_of(std::vector<vertex_id> vertices) const;
  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  // sorted distinct vertex ids; position in this list is the dense vertex index
  const std::vector<vertex_id>& vertex_ids() const { return vertex_ids_; }
  int dense_vertex_index(vertex_id v) const;

 private:
  std::vector<simplex> simplices_;
  std::vector<std::vector<int>> facets_;
  std::map<std::vector<vertex_id>, int> index_;
  std::vector<vertex_id> vertex_ids_;
  int dim_ = 0;
};

// monotone simplex-wise function: f(face) <= f(coface). the complex must
// outlive the filter; only a pointer is kept.
class filter_function {
 public:
  filter_function(const simplicial_complex& k, std::vector<double> values);

  const simplicial_complex& complex() const { return *complex_; }
  double operator[](int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  const simplicial_complex* complex_;
  std::vector<double> values_;
};

// the pre-order induced on simplices by filter values, with ties grouped at a
// tolerance. two filters are ordering-equivalent iff their signatures compare
// equal. grouping is by consecutive gaps in the sorted values.
class preorder_signature {
 public:
  explicit preorder_signature(const filter_function& f, double tie_tolerance = 1e-12);
  explicit preorder_signature(const std::vector<double>& values, double tie_tolerance = 1e-12);

  // -1 / 0 / +1 comparing the tie groups of simplices i and j
  int sign(int i, int j) const;
  int group_of(int i) const { return group_of_[i]; }
  int group_count() const { return static_cast<int>(group_starts_.size()); }
  // simplex indices sorted by ascending value, ties by index
  const std::vector<int>& sorted_order() const { return order_; }
  // offsets into sorted_order where each tie group begins
  const std::vector<int>& group_starts() const { return group_starts_; }

  bool operator==(const preorder_signature& o) const { return group_of_ == o.group_of_; }
  bool operator!=(const preorder_signature& o) const { return !(*this == o); }

 private:
  std::vector<int> order_;
  std::vector<int> group_starts_;
  std::vector<int> group_of_;
};

// half the smallest gap between distinct filter values over all simplex pairs;
// 0 when two simplices tie exactly. within this radius of f (sup norm) the
// ordering cannot change.
double gap_radius(const filter_function& f);

}  // namespace diffbar
