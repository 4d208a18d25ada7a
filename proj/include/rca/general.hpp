#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "rca/contrastive.hpp"
#include "rca/cumulants.hpp"

namespace rca {

// Multi-view model: k views, p latent components; component j feeds exactly the
// views in subsets[j] through per-view square maps, with the map at min(subsets[j])
// normalized to the identity. View ids are 0-based internally (1-based in JSON).
struct SetSystem {
  int k = 0;
  std::vector<std::vector<int>> subsets;
  std::optional<int> L;  // smallest certified distinguishability level, if known

  void validate() const {
    if (k < 1) throw invalid_input("SetSystem: k must be positive");
    if (subsets.empty()) throw invalid_input("SetSystem: no subsets");
    for (const auto& q : subsets) {
      if (q.empty()) throw invalid_input("SetSystem: empty subset");
      if (!std::is_sorted(q.begin(), q.end())) throw invalid_input("SetSystem: subsets must be sorted");
      if (std::adjacent_find(q.begin(), q.end()) != q.end())
        throw invalid_input("SetSystem: duplicate view in subset");
      if (q.front() < 0 || q.back() >= k) throw invalid_input("SetSystem: view id out of range");
    }
    for (std::size_t a = 0; a < subsets.size(); ++a)
      for (std::size_t b = a + 1; b < subsets.size(); ++b)
        if (subsets[a] == subsets[b]) throw invalid_input("SetSystem: subsets must be distinct");
  }
};

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct DistinguishingCertificate {
  int L = 0;
  std::vector<std::vector<int>> T;  // T[j] subset of subsets[j], |T[j]| <= L
};

// A component for which no distinguishing set of size <= L exists, together with
// the last competing subset that defeated the search.
struct DistinguishWitness {
  int j = -1;
  int j_other = -1;
};

using DistinguishResult = std::variant<DistinguishingCertificate, DistinguishWitness>;

// Exhaustive search for distinguishing sets: T works for Q_j iff every other
// Q_j' either strictly contains Q_j or fails to contain T. Candidates are tried
// smallest first, lexicographic within a size.
inline DistinguishResult check_distinguishable(const SetSystem& sys, int L) {
  sys.validate();
  if (L < 1 || L > sys.k) throw invalid_input("check_distinguishable: L must be in 1..k");
  DistinguishingCertificate cert;
  cert.L = L;
  const int p = static_cast<int>(sys.subsets.size());
  for (int j = 0; j < p; ++j) {
    const auto& q = sys.subsets[j];
    const int m = static_cast<int>(q.size());
    std::optional<std::vector<int>> found;
    int last_violator = -1;
    for (int size = 1; size <= std::min(L, m) && !found; ++size) {
      std::vector<int> pick(size);
      for (int i = 0; i < size; ++i) pick[i] = i;
      while (true) {
        std::vector<int> t(size);
        for (int i = 0; i < size; ++i) t[i] = q[pick[i]];
        bool ok = true;
        for (int o = 0; o < p && ok; ++o) {
          if (o == j) continue;
          if (!is_subset(q, sys.subsets[o]) && is_subset(t, sys.subsets[o])) {
            ok = false;
            last_violator = o;
          }
        }
        if (ok) {
          found = t;
          break;
        }
        // next combination
        int i = size - 1;
        while (i >= 0 && pick[i] == m - size + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int r = i + 1; r < size; ++r) pick[r] = pick[r - 1] + 1;
      }
    }
    if (!found) return DistinguishWitness{j, last_violator};
    cert.T.push_back(*found);
  }
  return cert;
}

// Smallest L with a certificate, or nullopt.
inline std::optional<int> smallest_distinguishable_level(const SetSystem& sys) {
  for (int L = 1; L <= sys.k; ++L)
    if (std::holds_alternative<DistinguishingCertificate>(check_distinguishable(sys, L))) return L;
  return std::nullopt;
}

// Abstract source of joint cumulants kappa(X_{slots[0]}, ..., X_{slots[t-1]}).
// Implementations: empirical (centered samples) and exact (model tensors).
class CumulantProvider {
 public:
  virtual ~CumulantProvider() = default;
  virtual int views() const = 0;
  virtual int dim() const = 0;
  virtual DenseTensor cross(const std::vector<int>& slots) const = 0;
};

class EmpiricalCumulants final : public CumulantProvider {
 public:
  explicit EmpiricalCumulants(const std::vector<Matrix>& views) {
    if (views.empty()) throw invalid_input("EmpiricalCumulants: no views");
    const Eigen::Index n = views[0].rows();
    const Eigen::Index d = views[0].cols();
    for (const Matrix& v : views)
      if (v.rows() != n || v.cols() != d)
        throw invalid_input("EmpiricalCumulants: views must share n and d");
    centered_.reserve(views.size());
    for (const Matrix& v : views) centered_.push_back(centered(v));
    std::vector<const Matrix*> ptrs;
    for (const Matrix& v : centered_) ptrs.push_back(&v);
    cache_ = std::make_unique<BlockMomentCache>(ptrs);
  }

  int views() const override { return static_cast<int>(centered_.size()); }
  int dim() const override { return static_cast<int>(centered_[0].cols()); }
  DenseTensor cross(const std::vector<int>& slots) const override {
    return cross_cumulant_centered(*cache_, slots);
  }

 private:
  std::vector<Matrix> centered_;
  std::unique_ptr<BlockMomentCache> cache_;
};

// Exact cumulants of the model U_i = sum_j A^{(i,j)} S_j assembled by additivity
// and multilinearity from per-component cumulant tensors.
class ExactModelCumulants final : public CumulantProvider {
 public:
  struct Component {
    std::vector<int> subset;            // views it feeds (sorted, 0-based)
    std::map<int, DenseTensor> kappa;   // order -> cumulant tensor of S_j
    std::map<int, Matrix> maps;         // view -> A^{(view, j)}
  };

  ExactModelCumulants(int k, int d, std::vector<Component> components)
      : k_(k), d_(d), components_(std::move(components)) {}

  int views() const override { return k_; }
  int dim() const override { return d_; }

  DenseTensor cross(const std::vector<int>& slots) const override {
    const int t = static_cast<int>(slots.size());
    DenseTensor out = DenseTensor::cube(t, d_);
    for (const Component& c : components_) {
      bool active = true;
      for (int v : slots)
        active &= std::binary_search(c.subset.begin(), c.subset.end(), v);
      if (!active) continue;
      auto it = c.kappa.find(t);
      if (it == c.kappa.end())
        throw invalid_input("ExactModelCumulants: missing cumulant order");
      std::vector<Matrix> maps;
      maps.reserve(t);
      for (int v : slots) maps.push_back(c.maps.at(v));
      out += push_through_maps(it->second, maps);
    }
    return out;
  }

 private:
  int k_ = 0;
  int d_ = 0;
  std::vector<Component> components_;
};

struct GeneralExtraction {
  int L = 0;
  std::vector<std::vector<int>> T;        // certificate used
  std::vector<int> order;                 // processing order (maximal-first)
  std::vector<std::vector<Matrix>> maps;  // maps[j][view], zero matrix when unused
  std::vector<DenseTensor> kappa;         // order-(L+1) cumulant per component
  std::vector<bool> zero;                 // detected-zero components
};

namespace detail {

// Deterministic maximal-first order: descending size, then lexicographic. Any
// strict superset has strictly larger size, so supersets always come first.
inline std::vector<int> processing_order(const SetSystem& sys) {
  std::vector<int> order(sys.subsets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (sys.subsets[a].size() != sys.subsets[b].size())
      return sys.subsets[a].size() > sys.subsets[b].size();
    return sys.subsets[a] < sys.subsets[b];
  });
  return order;
}

// Distinguishing set padded to exactly L slots by repeating its last element.
inline std::vector<int> padded_slots(const std::vector<int>& t_set, int L) {
  std::vector<int> w = t_set;
  while (static_cast<int>(w.size()) < L) w.push_back(t_set.back());
  return w;
}

}  // namespace detail

// Recover every per-view map from order-(L+1) cross-cumulants, processing subsets
// maximal-first and subtracting the already-identified superset contributions:
//   M_i = unfold(kappa(U_{w_1},...,U_{w_L}, U_i) - corrections),
//   A^{(i,j)} = (pinv(M_{min Q_j}) M_i)^T,  A^{(min Q_j, j)} = I.
// A component whose anchor unfolding is numerically rank deficient is declared
// zero and skipped downstream.
inline GeneralExtraction find_linear(const CumulantProvider& provider, SetSystem sys,
                                     double zero_tol = 1e-6, double rank_tol = 1e-10) {
  sys.validate();
  if (provider.views() != sys.k) throw invalid_input("find_linear: provider view count differs");
  const int d = provider.dim();

  int L;
  if (sys.L) {
    L = *sys.L;
  } else {
    auto lvl = smallest_distinguishable_level(sys);
    if (!lvl) throw invalid_input("find_linear: set system is not distinguishable at any level");
    L = *lvl;
  }
  auto res = check_distinguishable(sys, L);
  if (!std::holds_alternative<DistinguishingCertificate>(res))
    throw invalid_input("find_linear: no distinguishing certificate at the requested level");
  auto cert = std::get<DistinguishingCertificate>(res);

  const int p = static_cast<int>(sys.subsets.size());
  GeneralExtraction out;
  out.L = L;
  out.T = cert.T;
  out.order = detail::processing_order(sys);
  out.maps.assign(p, std::vector<Matrix>(sys.k, Matrix::Zero(d, d)));
  out.kappa.assign(p, DenseTensor::cube(L + 1, d));
  out.zero.assign(p, false);

  std::vector<int> processed;
  for (int j : out.order) {
    const auto& q = sys.subsets[j];
    const std::vector<int> w = detail::padded_slots(cert.T[j], L);
    const int anchor = q.front();  // min Q_j

    // Processed strict supersets of Q_j contribute to every cumulant over T.
    std::vector<int> supers;
    for (int l : processed)
      if (l != j && is_subset(q, sys.subsets[l]) && !out.zero[l]) supers.push_back(l);

    auto corrected_cumulant = [&](int i) {
      std::vector<int> slots = w;
      slots.push_back(i);
      DenseTensor k = provider.cross(slots);
      for (int l : supers) {
        std::vector<Matrix> maps;
        maps.reserve(L + 1);
        for (int s = 0; s < L; ++s) maps.push_back(out.maps[l][w[s]]);
        maps.push_back(out.maps[l][i]);
        k -= push_through_maps(out.kappa[l], maps);
      }
      return k;
    };

    const Matrix m_anchor = unfold(corrected_cumulant(anchor));
    Eigen::JacobiSVD<Matrix> svd(m_anchor, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > zero_tol * m_anchor.norm())) {
      out.zero[j] = true;
      processed.push_back(j);
      continue;
    }
    Matrix m_pinv = svd.matrixV() *
                    (s.array() > rank_tol * s(0)).select(s.array().inverse(), 0.0).matrix().asDiagonal() *
                    svd.matrixU().transpose();

    out.maps[j][anchor] = Matrix::Identity(d, d);  // normalization A^{(min Q_j, j)} = I
    for (int i : q) {
      if (i == anchor) continue;
      out.maps[j][i] = (m_pinv * unfold(corrected_cumulant(i))).transpose();
    }

    // kappa_{L+1}(S_j) from the inverse-transformed distinguishing views with the
    // anchor view last, minus the matching superset corrections.
    std::vector<Matrix> inv_w(L);
    for (int s = 0; s < L; ++s) inv_w[s] = pinv(out.maps[j][w[s]], rank_tol);
    {
      std::vector<int> slots = w;
      slots.push_back(anchor);
      std::vector<Matrix> maps = inv_w;
      maps.push_back(Matrix::Identity(d, d));
      DenseTensor k = push_through_maps(provider.cross(slots), maps);
      for (int l : supers) {
        std::vector<Matrix> cmaps(L + 1);
        for (int s = 0; s < L; ++s) cmaps[s] = inv_w[s] * out.maps[l][w[s]];
        cmaps[L] = out.maps[l][anchor];
        k -= push_through_maps(out.kappa[l], cmaps);
      }
      out.kappa[j] = std::move(k);
    }
    processed.push_back(j);
  }

  bool all_zero = true;
  for (bool z : out.zero) all_zero &= z;
  if (all_zero) throw degenerate_error("find_linear: every component was detected as zero");
  return out;
}

inline GeneralExtraction find_linear(const std::vector<Matrix>& views, const SetSystem& sys,
                                     double zero_tol = 1e-6, double rank_tol = 1e-10) {
  EmpiricalCumulants provider(views);
  return find_linear(provider, sys, zero_tol, rank_tol);
}

// Order-t cumulants of every component from the recovered maps. Each component's
// cumulant is the average over all surjective slot assignments [t] -> T_j of the
// inverse-transformed cross-cumulant, minus the matching superset corrections:
//   kappa_t(S_j) = avg_w [ kappa_t((A^{(w_s,j)})^{-1} U_{w_s}) ]
//                 - sum_l avg_w [ kappa_t(S_l)((A^{(w_s,j)})^{-1} A^{(w_s,l)}) ].
// Averaging over assignments reduces variance and, on the contrastive system,
// reproduces the two-view pattern-averaged extractor on identical samples.
// Requires t >= L: below the distinguishability level the components cannot be
// told apart by any cumulant of that order.
inline std::vector<DenseTensor> compute_cumulants(const CumulantProvider& provider,
                                                  const SetSystem& sys,
                                                  const GeneralExtraction& ext, int t,
                                                  double rank_tol = 1e-10) {
  sys.validate();
  if (t < ext.L)
    throw invalid_input("compute_cumulants: order t is below the distinguishability level L");
  if (t > kMaxCumulantOrder) throw invalid_input("compute_cumulants: order above cap");
  const int d = provider.dim();
  const int p = static_cast<int>(sys.subsets.size());
  std::vector<DenseTensor> out(p, DenseTensor::cube(t, d));
  std::vector<bool> done(p, false);

  for (int j : ext.order) {
    if (ext.zero[j]) {
      done[j] = true;
      continue;
    }
    const auto& q = sys.subsets[j];
    const auto& t_set = ext.T[j];
    const int v = static_cast<int>(t_set.size());

    std::vector<int> supers;
    for (int l : ext.order) {
      if (l == j || !done[l] || ext.zero[l]) continue;
      if (is_subset(q, sys.subsets[l])) supers.push_back(l);
    }

    std::map<int, Matrix> inv;  // view -> (A^{(view, j)})^{-1}
    for (int w : t_set) inv[w] = pinv(ext.maps[j][w], rank_tol);

    DenseTensor acc = DenseTensor::cube(t, d);
    int count = 0;
    std::vector<int> assign(t, 0);
    std::size_t total = 1;
    for (int m = 0; m < t; ++m) total *= v;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      unsigned seen = 0;
      for (int m = 0; m < t; ++m) {
        assign[m] = static_cast<int>(c % v);
        seen |= 1u << assign[m];
        c /= v;
      }
      if (seen != (1u << v) - 1u) continue;
      std::vector<int> slots(t);
      std::vector<Matrix> inv_maps(t);
      for (int m = 0; m < t; ++m) {
        slots[m] = t_set[assign[m]];
        inv_maps[m] = inv[slots[m]];
      }
      acc += push_through_maps(provider.cross(slots), inv_maps);
      for (int l : supers) {
        std::vector<Matrix> cmaps(t);
        for (int m = 0; m < t; ++m) cmaps[m] = inv_maps[m] * ext.maps[l][slots[m]];
        acc -= push_through_maps(out[l], cmaps);
      }
      ++count;
    }
    if (count == 0)
      throw invalid_input("compute_cumulants: order t below the distinguishing set size");
    acc *= 1.0 / count;
    out[j] = std::move(acc);
    done[j] = true;
  }
  return out;
}

inline std::vector<DenseTensor> compute_cumulants(const std::vector<Matrix>& views,
                                                  const SetSystem& sys,
                                                  const GeneralExtraction& ext, int t,
                                                  double rank_tol = 1e-10) {
  EmpiricalCumulants provider(views);
  return compute_cumulants(provider, sys, ext, t, rank_tol);
}

}  // namespace rca
