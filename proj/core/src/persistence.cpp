#include "diffbar/persistence.hpp"

#include <algorithm>
#include <sstream>

namespace diffbar {

std::vector<int> filtration_order(const filter_function& f) {
  const simplicial_complex& k = f.complex();
  std::vector<int> order(k.size());
  for (int i = 0; i < k.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (f[a] != f[b]) return f[a] < f[b];
    return simplex_before(k.at(a), k.at(b));
  });
  return order;
}

namespace {

// symmetric difference of sorted position lists
std::vector<int> xor_columns(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

reduction_certificate reduce(const simplicial_complex& k, const std::vector<int>& order) {
  const int n = k.size();
  if (static_cast<int>(order.size()) != n)
    throw order_violation("order length does not match complex size");

  reduction_certificate cert;
  cert.order = order;
  cert.position.assign(n, -1);
  for (int pos = 0; pos < n; ++pos) {
    const int s = order[pos];
    if (s < 0 || s >= n || cert.position[s] != -1)
      throw order_violation("order is not a permutation of the simplices");
    cert.position[s] = pos;
  }
  for (int s = 0; s < n; ++s)
    for (int face : k.facets(s))
      if (cert.position[face] > cert.position[s]) {
        std::ostringstream msg;
        msg << "face " << face << " ordered after coface " << s;
        throw order_violation(msg.str());
      }

  cert.positive.assign(n, 0);
  cert.partner.assign(n, -1);

  std::vector<std::vector<int>> reduced(n);   // by position
  std::vector<int> pivot_owner(n, -1);        // low position -> reducing column position
  for (int pos = 0; pos < n; ++pos) {
    const int s = order[pos];
    std::vector<int> col;
    col.reserve(k.facets(s).size());
    for (int face : k.facets(s)) col.push_back(cert.position[face]);
    std::sort(col.begin(), col.end());
    while (!col.empty() && pivot_owner[col.back()] != -1)
      col = xor_columns(col, reduced[pivot_owner[col.back()]]);
    if (col.empty()) {
      cert.positive[s] = 1;
    } else {
      const int low = col.back();
      pivot_owner[low] = pos;
      const int creator = order[low];
      cert.partner[creator] = s;
      cert.partner[s] = creator;
    }
    reduced[pos] = std::move(col);
  }
  return cert;
}

namespace {

void check_degree(const simplicial_complex& k, int degree) {
  if (degree < 0 || degree > k.dimension()) {
    std::ostringstream msg;
    msg << "degree " << degree << " outside 0.." << k.dimension();
    throw bad_degree(msg.str());
  }
}

}  // namespace

void barcode::canonicalize() {
  std::sort(finite.begin(), finite.end());
  std::sort(infinite_births.begin(), infinite_births.end());
}

barcode diagram(const filter_function& f, int degree) {
  check_degree(f.complex(), degree);
  const barcode_template t = build_barcode_template(f, degree);
  barcode out;
  for (const auto& [birth_s, death_s] : t.pairs)
    if (f[birth_s] < f[death_s]) out.finite.emplace_back(f[birth_s], f[death_s]);
  for (int s : t.unpaired) out.infinite_births.push_back(f[s]);
  out.canonicalize();
  return out;
}

barcode_template build_barcode_template(const filter_function& f, int degree) {
  check_degree(f.complex(), degree);
  const simplicial_complex& k = f.complex();
  const reduction_certificate cert = reduce(k, filtration_order(f));
  barcode_template t;
  t.degree = degree;
  for (int s = 0; s < k.size(); ++s) {
    if (k.at(s).dimension() != degree || !cert.positive[s]) continue;
    if (cert.partner[s] == -1)
      t.unpaired.push_back(s);
    else
      t.pairs.emplace_back(s, cert.partner[s]);
  }
  std::sort(t.pairs.begin(), t.pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::sort(t.unpaired.begin(), t.unpaired.end());
  return t;
}

total_barcode_template build_total_template(const filter_function& f) {
  total_barcode_template out;
  for (int p = 0; p <= f.complex().dimension(); ++p)
    out.by_degree.push_back(build_barcode_template(f, p));
  return out;
}

ordered_barcode realize_template(const barcode_template& t, const filter_function& f) {
  ordered_barcode x;
  x.m = t.pair_count();
  x.n = t.unpaired_count();
  x.data.resize(x.dim());
  for (int i = 0; i < x.m; ++i) {
    x.data[2 * i] = f[t.pairs[i].first];
    x.data[2 * i + 1] = f[t.pairs[i].second];
  }
  for (int j = 0; j < x.n; ++j) x.data[2 * x.m + j] = f[t.unpaired[j]];
  return x;
}

global_lift perm_lift(const filter_function& f) {
  const total_barcode_template total = build_total_template(f);
  global_lift lift;
  for (const auto& t : total.by_degree) {
    lift.per_degree.push_back(realize_template(t, f));
    for (const auto& [birth_s, death_s] : t.pairs) {
      lift.slot_to_simplex.push_back(birth_s);
      lift.slot_to_simplex.push_back(death_s);
    }
    for (int s : t.unpaired) lift.slot_to_simplex.push_back(s);
  }
  return lift;
}

}  // namespace diffbar
