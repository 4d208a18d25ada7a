#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include "rca/tensor.hpp"

namespace rca {

// A set partition of {0..t-1}: blocks sorted internally and by first element.
using Partition = std::vector<std::vector<int>>;

inline constexpr int kMaxCumulantOrder = 6;

namespace detail {

inline void enumerate_partitions(int t, std::vector<Partition>& out) {
  // Restricted-growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(t, 0);
  auto emit = [&] {
    int blocks = 0;
    for (int i = 0; i < t; ++i) blocks = std::max(blocks, a[i] + 1);
    Partition p(blocks);
    for (int i = 0; i < t; ++i) p[a[i]].push_back(i);
    out.push_back(std::move(p));
  };
  std::function<void(int, int)> rec = [&](int i, int maxv) {
    if (i == t) {
      emit();
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(maxv, v));
    }
  };
  rec(1, 0);  // a[0] = 0 always
}

}  // namespace detail

// All set partitions of {0..t-1}; cached. Counts follow the Bell numbers:
// 1, 2, 5, 15, 52, 203 for t = 1..6.
inline const std::vector<Partition>& partitions_of(int t) {
  if (t < 1 || t > 8) throw invalid_input("partitions_of: order must be in 1..8");
  static const std::array<std::vector<Partition>, 9> cache = [] {
    std::array<std::vector<Partition>, 9> c;
    for (int k = 1; k <= 8; ++k) detail::enumerate_partitions(k, c[k]);
    return c;
  }();
  return cache[t];
}

// (-1)^{|pi|-1} (|pi|-1)!  — the Moebius coefficient of the moment-to-cumulant sum.
inline double partition_coefficient(int blocks) {
  double c = 1.0;
  for (int k = 1; k < blocks; ++k) c *= -k;
  return c;
}

// Remove the column means. All estimators below are plug-in (biased) moments of
// empirically centered data; this is the default convention everywhere.
inline Matrix centered(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

namespace detail {

// Plug-in block moment: out(i_1..i_b) = (1/n) sum_s prod_m views[m](s, i_m).
// Views are one matrix pointer per block position (repeats allowed).
inline DenseTensor block_moment(const std::vector<const Matrix*>& views) {
  const int b = static_cast<int>(views.size());
  const Eigen::Index n = views[0]->rows();
  std::vector<int> dims(b);
  for (int m = 0; m < b; ++m) {
    if (views[m]->rows() != n) throw invalid_input("block_moment: sample counts differ");
    dims[m] = static_cast<int>(views[m]->cols());
  }
  DenseTensor out(dims);
  if (b == 1) {
    Vector mean = views[0]->colwise().mean();
    for (int i = 0; i < dims[0]; ++i) out[i] = mean(i);
    return out;
  }
  if (b == 2) {
    Matrix m = views[0]->transpose() * (*views[1]) / static_cast<double>(n);
    for (int i = 0; i < dims[0]; ++i)
      for (int j = 0; j < dims[1]; ++j) out[static_cast<std::size_t>(i) * dims[1] + j] = m(i, j);
    return out;
  }
  // Higher orders: accumulate one sample at a time, walking the leading b-1 modes
  // with a running prefix product and updating the innermost fiber vectorized.
  const Matrix& last = *views[b - 1];
  const int dl = dims[b - 1];
  std::vector<int> idx(b - 1, 0);
  for (Eigen::Index s = 0; s < n; ++s) {
    std::function<void(int, std::size_t, double)> rec = [&](int m, std::size_t off, double prefix) {
      if (m == b - 1) {
        Eigen::Map<Eigen::VectorXd>(out.data() + off * dl, dl) +=
            prefix * last.row(s).transpose();
        return;
      }
      const Matrix& vm = *views[m];
      for (int i = 0; i < dims[m]; ++i) rec(m + 1, off * dims[m] + i, prefix * vm(s, i));
    };
    rec(0, 0, 1.0);
  }
  out *= 1.0 / static_cast<double>(n);
  return out;
}

// out[i_0..i_{t-1}] += coeff * prod_{B in pi} moments[B][(i_m)_{m in B}], walking the
// full index space once with per-block partial offsets; each block's factor is
// multiplied in at its last mode, so the inner work is O(1) amortized per entry.
inline void accumulate_partition(DenseTensor& out, const Partition& pi,
                                 const std::vector<const DenseTensor*>& moments, double coeff) {
  const int t = out.order();
  const int nb = static_cast<int>(pi.size());
  std::vector<int> block_of(t), pos_in_block(t);
  std::vector<std::vector<std::size_t>> stride(nb);
  std::vector<int> last_mode(nb);
  for (int b = 0; b < nb; ++b) {
    const auto& modes = pi[b];
    stride[b].assign(modes.size(), 1);
    for (int p = static_cast<int>(modes.size()) - 2; p >= 0; --p)
      stride[b][p] = stride[b][p + 1] * moments[b]->dims()[p + 1];
    for (int p = 0; p < static_cast<int>(modes.size()); ++p) {
      block_of[modes[p]] = b;
      pos_in_block[modes[p]] = p;
    }
    last_mode[b] = modes.back();
  }
  std::vector<std::size_t> off(nb, 0);
  const auto& dims = out.dims();
  std::function<void(int, std::size_t, double)> rec = [&](int m, std::size_t flat, double partial) {
    if (m == t) {
      out[flat] += coeff * partial;
      return;
    }
    const int b = block_of[m];
    const std::size_t saved = off[b];
    for (int i = 0; i < dims[m]; ++i) {
      off[b] = saved + static_cast<std::size_t>(i) * stride[b][pos_in_block[m]];
      const double p = (m == last_mode[b]) ? partial * (*moments[b])[off[b]] : partial;
      rec(m + 1, flat * dims[m] + i, p);
    }
    off[b] = saved;
  };
  rec(0, 0, 1.0);
}

}  // namespace detail

// Shared store of block moments for repeated cumulant evaluations over one pool of
// (already centered) matrices. Keys are the per-position pool labels of a block, so
// mixed-pattern cumulant sweeps reuse every moment they have in common.
class BlockMomentCache {
 public:
  explicit BlockMomentCache(std::vector<const Matrix*> pool) : pool_(std::move(pool)) {
    if (pool_.empty()) throw invalid_input("BlockMomentCache: empty pool");
    n_ = pool_[0]->rows();
    for (const Matrix* m : pool_)
      if (m->rows() != n_) throw invalid_input("BlockMomentCache: sample counts differ");
  }

  int pool_size() const { return static_cast<int>(pool_.size()); }
  const Matrix& view(int label) const { return *pool_[label]; }

  const DenseTensor& moment(const std::vector<int>& labels) {
    auto it = cache_.find(labels);
    if (it != cache_.end()) return it->second;
    std::vector<const Matrix*> views(labels.size());
    for (std::size_t m = 0; m < labels.size(); ++m) views[m] = pool_[labels[m]];
    return cache_.emplace(labels, detail::block_moment(views)).first->second;
  }

 private:
  std::vector<const Matrix*> pool_;
  Eigen::Index n_;
  std::map<std::vector<int>, DenseTensor> cache_;
};

// Joint cumulant of (pool[slot[0]], ..., pool[slot[t-1]]) for centered views:
//   kappa_t = sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_{B in pi} E-hat[prod_{m in B} X_m].
// Centering makes singleton blocks vanish identically, so those partitions are
// skipped; this is exact, not an approximation.
inline DenseTensor cross_cumulant_centered(BlockMomentCache& cache, const std::vector<int>& slots) {
  const int t = static_cast<int>(slots.size());
  if (t < 1 || t > kMaxCumulantOrder)
    throw invalid_input("cross_cumulant: order must be in 1..6");
  std::vector<int> dims(t);
  for (int m = 0; m < t; ++m) dims[m] = static_cast<int>(cache.view(slots[m]).cols());
  DenseTensor out(dims);
  std::vector<int> labels;
  std::vector<const DenseTensor*> moments;
  for (const Partition& pi : partitions_of(t)) {
    bool has_singleton = false;
    for (const auto& block : pi) has_singleton |= block.size() == 1;
    if (has_singleton) continue;
    moments.clear();
    for (const auto& block : pi) {
      labels.clear();
      for (int m : block) labels.push_back(slots[m]);
      moments.push_back(&cache.moment(labels));
    }
    detail::accumulate_partition(out, pi, moments, partition_coefficient(static_cast<int>(pi.size())));
  }
  return out;
}

// Joint cumulant of arbitrary views. Centers each view by default; with
// center = false the full partition sum including singleton blocks is used.
inline DenseTensor cross_cumulant(const std::vector<const Matrix*>& views, bool center = true) {
  const int t = static_cast<int>(views.size());
  if (t < 1 || t > kMaxCumulantOrder)
    throw invalid_input("cross_cumulant: order must be in 1..6");
  if (center) {
    std::vector<Matrix> own;
    own.reserve(t);
    std::vector<const Matrix*> ptrs;
    // Center each distinct matrix once so repeated views share storage.
    std::map<const Matrix*, int> seen;
    for (const Matrix* v : views) {
      auto it = seen.find(v);
      if (it == seen.end()) {
        seen.emplace(v, static_cast<int>(own.size()));
        own.push_back(centered(*v));
      }
    }
    for (const Matrix& m : own) ptrs.push_back(&m);
    std::vector<int> slots(t);
    for (int m = 0; m < t; ++m) slots[m] = seen[views[m]];
    BlockMomentCache cache(ptrs);
    return cross_cumulant_centered(cache, slots);
  }
  std::vector<int> dims(t);
  for (int m = 0; m < t; ++m) dims[m] = static_cast<int>(views[m]->cols());
  DenseTensor out(dims);
  BlockMomentCache cache({views.begin(), views.end()});
  std::vector<int> labels;
  std::vector<const DenseTensor*> moments;
  for (const Partition& pi : partitions_of(t)) {
    moments.clear();
    for (const auto& block : pi) {
      labels.clear();
      for (int m : block) labels.push_back(m);
      moments.push_back(&cache.moment(labels));
    }
    detail::accumulate_partition(out, pi, moments, partition_coefficient(static_cast<int>(pi.size())));
  }
  return out;
}

// kappa_t(X, ..., X) with empirical centering.
inline DenseTensor auto_cumulant(const Matrix& x, int t) {
  Matrix xc = centered(x);
  BlockMomentCache cache({&xc});
  return cross_cumulant_centered(cache, std::vector<int>(t, 0));
}

// Raw moment tensor E[X tensor ... tensor X] (t copies, zero-mean X) assembled from
// the cumulants of orders 2..t: the inverse partition sum with unit coefficients.
inline DenseTensor moment_from_cumulants(int t,
                                         const std::function<const DenseTensor&(int)>& kappa) {
  if (t < 2 || t > kMaxCumulantOrder)
    throw invalid_input("moment_from_cumulants: order must be in 2..6");
  const DenseTensor& k2 = kappa(2);
  const int d = k2.dims()[0];
  DenseTensor out = DenseTensor::cube(t, d);
  std::vector<const DenseTensor*> factors;
  for (const Partition& pi : partitions_of(t)) {
    bool has_singleton = false;
    for (const auto& block : pi) has_singleton |= block.size() == 1;
    if (has_singleton) continue;  // zero mean
    factors.clear();
    for (const auto& block : pi) factors.push_back(&kappa(static_cast<int>(block.size())));
    detail::accumulate_partition(out, pi, factors, 1.0);
  }
  return out;
}

// E[X tensor^4] of a zero-mean variable from its second and fourth cumulants:
// m4 = k4 + the three k2 pairings.
inline DenseTensor fourth_moment_from_cumulants(const DenseTensor& k4, const Matrix& k2m) {
  const int d = static_cast<int>(k2m.rows());
  DenseTensor k2(std::vector<int>{d, d});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) k2[static_cast<std::size_t>(i) * d + j] = k2m(i, j);
  auto lookup = [&](int order) -> const DenseTensor& {
    if (order == 2) return k2;
    if (order == 4) return k4;
    throw invalid_input("fourth_moment_from_cumulants: unexpected order");
  };
  return moment_from_cumulants(4, lookup);
}

// Unbiased k-statistics for scalar samples, orders 1..3. Provided for sanity
// checks against the plug-in estimators; the library default stays plug-in.
inline double k_statistic(const Vector& x, int t) {
  const double n = static_cast<double>(x.size());
  if (x.size() < t) throw invalid_input("k_statistic: not enough samples");
  const double mean = x.mean();
  if (t == 1) return mean;
  double m2 = 0, m3 = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double c = x(i) - mean;
    m2 += c * c;
    m3 += c * c * c;
  }
  m2 /= n;
  m3 /= n;
  if (t == 2) return n / (n - 1) * m2;
  if (t == 3) return n * n / ((n - 1) * (n - 2)) * m3;
  throw invalid_input("k_statistic: order must be 1, 2 or 3");
}

}  // namespace rca
