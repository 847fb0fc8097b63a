#include "diffbar/barcode_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diffbar/errors.hpp"
#include "internal/assignment.hpp"

namespace diffbar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double linf(const std::pair<double, double>& p, const std::pair<double, double>& q) {
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}

double half_persistence(const std::pair<double, double>& p) {
  return (p.second - p.first) / 2.0;
}

// sorted copies with original indices, for pairing unbounded bars by birth
std::vector<int> sorted_index(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  return idx;
}

struct infinite_part {
  double cost = 0;  // sup or q-power sum, per caller
  std::vector<std::pair<int, int>> pairs;
};

infinite_part match_infinite_sup(const std::vector<double>& a, const std::vector<double>& b) {
  infinite_part out;
  const auto ia = sorted_index(a), ib = sorted_index(b);
  for (size_t k = 0; k < ia.size(); ++k) {
    out.cost = std::max(out.cost, std::abs(a[ia[k]] - b[ib[k]]));
    out.pairs.emplace_back(ia[k], ib[k]);
  }
  return out;
}

// bipartite feasibility at threshold t. left: a-points then b-ghosts; right:
// b-points then a-ghosts. ghost-ghost edges are free.
struct threshold_matcher {
  int n1, n2;
  const std::vector<std::vector<double>>* cost;  // n1 x n2
  const std::vector<double>* diag_a;
  const std::vector<double>* diag_b;

  std::vector<int> match_left, match_right;
  std::vector<char> visited;

  bool edge(int l, int r, double t) const {
    const bool lreal = l < n1, rreal = r < n2;
    if (lreal && rreal) return (*cost)[l][r] <= t;
    if (lreal) return (*diag_a)[l] <= t;  // a-point to a diagonal slot
    if (rreal) return (*diag_b)[r] <= t;  // diagonal slot to b-point
    return true;
  }

  bool augment(int l, double t) {
    for (int r = 0; r < n1 + n2; ++r) {
      if (visited[r] || !edge(l, r, t)) continue;
      visited[r] = 1;
      if (match_right[r] == -1 || augment(match_right[r], t)) {
        match_left[l] = r;
        match_right[r] = l;
        return true;
      }
    }
    return false;
  }

  bool feasible(double t) {
    const int total = n1 + n2;
    match_left.assign(total, -1);
    match_right.assign(total, -1);
    for (int l = 0; l < total; ++l) {
      visited.assign(total, 0);
      if (!augment(l, t)) return false;
    }
    return true;
  }
};

struct finite_bottleneck {
  double value = 0;
  std::vector<std::pair<int, int>> pairs;
};

finite_bottleneck bottleneck_finite(const std::vector<std::pair<double, double>>& a,
                                    const std::vector<std::pair<double, double>>& b) {
  finite_bottleneck out;
  const int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size());
  if (n1 == 0 && n2 == 0) return out;

  std::vector<std::vector<double>> cost(n1, std::vector<double>(n2));
  std::vector<double> diag_a(n1), diag_b(n2);
  std::vector<double> candidates{0.0};
  for (int i = 0; i < n1; ++i) {
    diag_a[i] = half_persistence(a[i]);
    candidates.push_back(diag_a[i]);
  }
  for (int j = 0; j < n2; ++j) {
    diag_b[j] = half_persistence(b[j]);
    candidates.push_back(diag_b[j]);
  }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      cost[i][j] = linf(a[i], b[j]);
      candidates.push_back(cost[i][j]);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  threshold_matcher matcher{n1, n2, &cost, &diag_a, &diag_b, {}, {}, {}};
  // smallest feasible candidate; feasibility is monotone in t
  int lo = 0, hi = static_cast<int>(candidates.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (matcher.feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  out.value = candidates[lo];
  matcher.feasible(out.value);
  for (int i = 0; i < n1; ++i)
    out.pairs.emplace_back(i, matcher.match_left[i] < n2 ? matcher.match_left[i] : -1);
  for (int j = 0; j < n2; ++j)
    if (matcher.match_right[j] >= n1) out.pairs.emplace_back(-1, j);
  return out;
}

double qpow(double x, double q) { return q == 1.0 ? x : std::pow(x, q); }

}  // namespace

barcode quotient(const ordered_barcode& x) {
  barcode out;
  for (int i = 0; i < x.m; ++i)
    if (x.birth(i) < x.death(i)) out.finite.emplace_back(x.birth(i), x.death(i));
  for (int j = 0; j < x.n; ++j) out.infinite_births.push_back(x.unbounded(j));
  out.canonicalize();
  return out;
}

ordered_barcode to_ordered(const barcode& d) {
  barcode c = d;
  c.canonicalize();
  ordered_barcode x;
  x.m = static_cast<int>(c.finite.size());
  x.n = static_cast<int>(c.infinite_births.size());
  x.data.resize(x.dim());
  for (int i = 0; i < x.m; ++i) {
    x.data[2 * i] = c.finite[i].first;
    x.data[2 * i + 1] = c.finite[i].second;
  }
  for (int j = 0; j < x.n; ++j) x.data[2 * x.m + j] = c.infinite_births[j];
  return x;
}

bottleneck_result bottleneck_with_matching(const barcode& a, const barcode& b) {
  bottleneck_result out;
  if (a.infinite_births.size() != b.infinite_births.size()) {
    out.value = kInf;
    return out;
  }
  const infinite_part inf = match_infinite_sup(a.infinite_births, b.infinite_births);
  const finite_bottleneck fin = bottleneck_finite(a.finite, b.finite);
  out.value = std::max(fin.value, inf.cost);
  out.match.finite_pairs = fin.pairs;
  out.match.infinite_pairs = inf.pairs;
  return out;
}

double bottleneck(const barcode& a, const barcode& b) {
  return bottleneck_with_matching(a, b).value;
}

wasserstein_result wasserstein(const barcode& a, const barcode& b, double q) {
  if (!(q > 0)) throw bad_exponent("wasserstein exponent must be positive");
  wasserstein_result out;
  out.exact = q >= 1.0;
  if (a.infinite_births.size() != b.infinite_births.size()) {
    out.value = kInf;
    return out;
  }

  double total = 0;
  const auto ia = sorted_index(a.infinite_births), ib = sorted_index(b.infinite_births);
  for (size_t k = 0; k < ia.size(); ++k) {
    total += qpow(std::abs(a.infinite_births[ia[k]] - b.infinite_births[ib[k]]), q);
    out.match.infinite_pairs.emplace_back(ia[k], ib[k]);
  }

  const int n1 = static_cast<int>(a.finite.size()), n2 = static_cast<int>(b.finite.size());
  const int n = n1 + n2;
  if (n > 0) {
    // rows: a-points then diagonal slots; cols: b-points then diagonal slots.
    // diagonal slots are interchangeable, so ghost costs depend only on the
    // real endpoint and ghost-ghost pairs are free.
    std::vector<std::vector<double>> c(n, std::vector<double>(n, 0));
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) c[i][j] = qpow(linf(a.finite[i], b.finite[j]), q);
    for (int i = 0; i < n1; ++i)
      for (int j = n2; j < n; ++j) c[i][j] = qpow(half_persistence(a.finite[i]), q);
    for (int i = n1; i < n; ++i)
      for (int j = 0; j < n2; ++j) c[i][j] = qpow(half_persistence(b.finite[j]), q);
    const std::vector<int> row_to_col = detail::solve_assignment(c);
    for (int i = 0; i < n; ++i) {
      total += c[i][row_to_col[i]];
      if (i < n1)
        out.match.finite_pairs.emplace_back(i, row_to_col[i] < n2 ? row_to_col[i] : -1);
      else if (row_to_col[i] < n2)
        out.match.finite_pairs.emplace_back(-1, row_to_col[i]);
    }
  }
  out.value = q == 1.0 ? total : std::pow(total, 1.0 / q);
  return out;
}

lipschitz_report lipschitz_check_quotient(const ordered_barcode& x, const ordered_barcode& y) {
  if (x.m != y.m || x.n != y.n)
    throw shape_error("ordered barcodes have different slot shapes");
  lipschitz_report r;
  r.bottleneck_value = bottleneck(quotient(x), quotient(y));
  r.sup_norm = x.dim() == 0 ? 0.0 : (x.data - y.data).lpNorm<Eigen::Infinity>();
  r.ok = r.bottleneck_value <= r.sup_norm + 1e-12;
  return r;
}

}  // namespace diffbar
