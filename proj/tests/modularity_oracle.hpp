#pragma once

// Exhaustive modularity optimum over all set partitions of a small node set (Bell(8) = 4140).
// Works on a dense symmetric matrix built from raw directed edge counts.

#include <functional>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

struct DenseGraph {
  std::vector<std::vector<double>> a;  // a[i][j] = links(i->j) + links(j->i), zero diagonal

  explicit DenseGraph(std::size_t n) : a(n, std::vector<double>(n, 0)) {}
  void add_directed(std::size_t i, std::size_t j, double w) {
    a[i][j] += w;
    a[j][i] += w;
  }
  std::size_t size() const { return a.size(); }
};

// Q = 1/(2m) * sum_ij [A_ij - gamma k_i k_j / (2m)] delta(c_i, c_j)
inline double modularity(const DenseGraph& g, const std::vector<int>& label, double gamma = 1.0) {
  const std::size_t n = g.size();
  std::vector<double> k(n, 0);
  double two_m = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += g.a[i][j];
      two_m += g.a[i][j];
    }
  if (two_m == 0) return 0;
  double q = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (label[i] == label[j]) q += g.a[i][j] - gamma * k[i] * k[j] / two_m;
  return q / two_m;
}

// Calls fn on every restricted growth string of length n.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> label(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      fn(label);
      return;
    }
    for (int c = 0; c <= max_label + 1; ++c) {
      label[i] = c;
      rec(i + 1, std::max(max_label, c));
    }
  };
  if (n == 0) {
    fn(label);
    return;
  }
  label[0] = 0;
  rec(1, 0);
}

inline std::pair<double, std::vector<int>> best_partition(const DenseGraph& g, double gamma = 1.0) {
  double best = -1e300;
  std::vector<int> arg;
  for_each_partition(g.size(), [&](const std::vector<int>& label) {
    double q = modularity(g, label, gamma);
    if (q > best + 1e-15) {
      best = q;
      arg = label;
    }
  });
  return {best, arg};
}

}  // namespace oracle
