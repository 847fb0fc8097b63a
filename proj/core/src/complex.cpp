#include "diffbar/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace diffbar {

bool simplex_before(const simplex& a, const simplex& b) {
  if (a.dimension() != b.dimension()) return a.dimension() < b.dimension();
  return a.vertices < b.vertices;
}

simplicial_complex simplicial_complex::build(const std::vector<std::vector<vertex_id>>& generators) {
  std::set<std::vector<vertex_id>> faces;
  for (const auto& g : generators) {
    std::vector<vertex_id> s = g;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      std::ostringstream msg;
      msg << "generator repeats a vertex (" << s.size() << " entries)";
      throw duplicate_simplex(msg.str());
    }
    if (s.empty()) continue;
    // enumerate all non-empty subsets; generators are tiny
    const int n = static_cast<int>(s.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<vertex_id> face;
      for (int b = 0; b < n; ++b)
        if (mask & (1u << b)) face.push_back(s[b]);
      faces.insert(std::move(face));
    }
  }
  if (faces.empty()) throw empty_complex("complex has no simplices");

  simplicial_complex k;
  k.simplices_.reserve(faces.size());
  for (const auto& f : faces) k.simplices_.push_back(simplex{f});
  std::sort(k.simplices_.begin(), k.simplices_.end(), simplex_before);

  std::set<vertex_id> verts;
  for (int i = 0; i < k.size(); ++i) {
    k.index_[k.simplices_[i].vertices] = i;
    k.dim_ = std::max(k.dim_, k.simplices_[i].dimension());
    for (vertex_id v : k.simplices_[i].vertices) verts.insert(v);
  }
  k.vertex_ids_.assign(verts.begin(), verts.end());

  k.facets_.resize(k.size());
  for (int i = 0; i < k.size(); ++i) {
    const auto& vs = k.simplices_[i].vertices;
    if (vs.size() < 2) continue;
    for (size_t drop = 0; drop < vs.size(); ++drop) {
      std::vector<vertex_id> face;
      face.reserve(vs.size() - 1);
      for (size_t j = 0; j < vs.size(); ++j)
        if (j != drop) face.push_back(vs[j]);
      k.facets_[i].push_back(k.index_.at(face));
    }
    std::sort(k.facets_[i].begin(), k.facets_[i].end());
  }
  return k;
}

int simplicial_complex::index_of(std::vector<vertex_id> vertices) const {
  std::sort(vertices.begin(), vertices.end());
  auto it = index_.find(vertices);
  return it == index_.end() ? -1 : it->second;
}

int simplicial_complex::dense_vertex_index(vertex_id v) const {
  auto it = std::lower_bound(vertex_ids_.begin(), vertex_ids_.end(), v);
  if (it == vertex_ids_.end() || *it != v) return -1;
  return static_cast<int>(it - vertex_ids_.begin());
}

filter_function::filter_function(const simplicial_complex& k, std::vector<double> values)
    : complex_(&k), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != k.size())
    throw shape_error("filter length does not match complex size");
  for (int i = 0; i < k.size(); ++i) {
    for (int face : k.facets(i)) {
      if (values_[face] > values_[i]) {
        std::ostringstream msg;
        msg << "filter value decreases from face " << face << " (" << values_[face]
            << ") to coface " << i << " (" << values_[i] << ")";
        throw not_a_filtration(face, i, msg.str());
      }
    }
  }
}

preorder_signature::preorder_signature(const filter_function& f, double tie_tolerance)
    : preorder_signature(f.values(), tie_tolerance) {}

preorder_signature::preorder_signature(const std::vector<double>& values, double tie_tolerance) {
  const int n = static_cast<int>(values.size());
  order_.resize(n);
  for (int i = 0; i < n; ++i) order_[i] = i;
  std::sort(order_.begin(), order_.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  group_of_.assign(n, 0);
  for (int pos = 0; pos < n; ++pos) {
    const bool new_group =
        pos == 0 || values[order_[pos]] - values[order_[pos - 1]] > tie_tolerance;
    if (new_group) group_starts_.push_back(pos);
    group_of_[order_[pos]] = static_cast<int>(group_starts_.size()) - 1;
  }
}

int preorder_signature::sign(int i, int j) const {
  const int gi = group_of_[i], gj = group_of_[j];
  return gi < gj ? -1 : (gi > gj ? 1 : 0);
}

double gap_radius(const filter_function& f) {
  std::vector<double> v = f.values();
  std::sort(v.begin(), v.end());
  if (v.size() < 2) return std::numeric_limits<double>::infinity();
  double smallest = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < v.size(); ++i) smallest = std::min(smallest, v[i] - v[i - 1]);
  return smallest / 2.0;
}

}  // namespace diffbar
