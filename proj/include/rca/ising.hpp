#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "rca/contrastive.hpp"
#include "rca/gradient.hpp"
#include "rca/random.hpp"

namespace rca {

// Undirected spin graph with canonical (i < j, lexicographically sorted) edges.
struct IsingGraph {
  int n_spins = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> neighbors;
  std::map<std::pair<int, int>, int> edge_index;

  static IsingGraph from_edges(int n_spins, std::vector<std::pair<int, int>> edges) {
    IsingGraph g;
    g.n_spins = n_spins;
    for (auto& e : edges) {
      if (e.first == e.second || e.first < 0 || std::max(e.first, e.second) >= n_spins)
        throw invalid_input("IsingGraph: bad edge");
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
      throw invalid_input("IsingGraph: duplicate edge");
    g.edges = std::move(edges);
    g.neighbors.assign(n_spins, {});
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      auto [i, j] = g.edges[e];
      g.neighbors[i].push_back(j);
      g.neighbors[j].push_back(i);
      g.edge_index[{i, j}] = static_cast<int>(e);
    }
    return g;
  }

  // side x side grid with periodic boundary (4-neighbor torus). Side 2 would
  // duplicate wrap edges, so side >= 3.
  static IsingGraph torus(int side) {
    if (side < 3) throw invalid_input("IsingGraph: torus side must be at least 3");
    std::vector<std::pair<int, int>> edges;
    auto id = [side](int r, int c) { return r * side + c; };
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) {
        edges.emplace_back(id(r, c), id(r, (c + 1) % side));
        edges.emplace_back(id(r, c), id((r + 1) % side, c));
      }
    return from_edges(side * side, std::move(edges));
  }

  int index(int i, int j) const {
    auto it = edge_index.find({std::min(i, j), std::max(i, j)});
    if (it == edge_index.end()) throw invalid_input("IsingGraph: edge not present");
    return it->second;
  }
};

// Torus Ising model description: couplings are indexed by the canonical edge
// list of IsingGraph::torus(side). Boundary is always periodic.
struct IsingSpec {
  int side = 0;
  Vector couplings;
  bool periodic = true;

  IsingGraph graph() const { return IsingGraph::torus(side); }
  void validate(double coupling_cap = 1.0) const {
    IsingGraph g = IsingGraph::torus(side);
    if (couplings.size() != static_cast<Eigen::Index>(g.edges.size()))
      throw invalid_input("IsingSpec: coupling count does not match the torus edge set");
    if (coupling_cap > 0 && couplings.size() > 0 &&
        couplings.cwiseAbs().maxCoeff() > coupling_cap)
      throw invalid_input("IsingSpec: coupling magnitude above the cap");
  }
};

// Full enumeration of P(s) proportional to exp(sum_e J_e s_i s_j).
struct IsingExact {
  Matrix states;  // 2^n x n, entries +-1
  Vector probs;
};

inline IsingExact ising_enumerate(const IsingGraph& g, const Vector& couplings) {
  if (g.n_spins > 20) throw invalid_input("ising_enumerate: too many spins to enumerate");
  if (couplings.size() != static_cast<Eigen::Index>(g.edges.size()))
    throw invalid_input("ising_enumerate: coupling count mismatch");
  const int n = g.n_spins;
  const std::size_t total = std::size_t{1} << n;
  IsingExact out;
  out.states = Matrix(total, n);
  Vector energy(total);
  for (std::size_t s = 0; s < total; ++s) {
    for (int i = 0; i < n; ++i) out.states(s, i) = (s >> i) & 1 ? 1.0 : -1.0;
    double e = 0.0;
    for (std::size_t k = 0; k < g.edges.size(); ++k)
      e += couplings(k) * out.states(s, g.edges[k].first) * out.states(s, g.edges[k].second);
    energy(s) = e;
  }
  const double emax = energy.maxCoeff();
  out.probs = (energy.array() - emax).exp();
  out.probs /= out.probs.sum();
  return out;
}

inline Matrix exact_m2(const IsingExact& model) {
  return model.states.transpose() * model.probs.asDiagonal() * model.states;
}

inline double exact_m4(const IsingExact& model, int i, int j, int k, int l) {
  return (model.states.col(i).array() * model.states.col(j).array() *
          model.states.col(k).array() * model.states.col(l).array() * model.probs.array())
      .sum();
}

inline Matrix ising_exact_sample(Rng& rng, const IsingExact& model, int n) {
  const Eigen::Index total = model.probs.size();
  Vector cdf(total);
  double acc = 0.0;
  for (Eigen::Index s = 0; s < total; ++s) {
    acc += model.probs(s);
    cdf(s) = acc;
  }
  Matrix out(n, model.states.cols());
  for (int r = 0; r < n; ++r) {
    const double u = rng.uniform() * acc;
    Eigen::Index lo = 0, hi = total - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (cdf(mid) < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    out.row(r) = model.states.row(lo);
  }
  return out;
}

// Sequential single-spin Gibbs sweeps, vectorized across n independent chains.
// (A synchronous two-color update is not a valid chain on an odd-sided torus,
// where wrap edges connect same-color sites, so spins are updated one at a
// time in a fixed order.)
inline Matrix ising_gibbs_sample(Rng& rng, const IsingGraph& g, const Vector& couplings, int n,
                                 int sweeps) {
  const int d = g.n_spins;
  Matrix jm = Matrix::Zero(d, d);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    jm(i, j) = jm(j, i) = couplings(e);
  }
  Matrix s(n, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) s(r, c) = rng.sign();
  for (int sweep = 0; sweep < sweeps; ++sweep)
    for (int i = 0; i < d; ++i) {
      const Vector h = s * jm.col(i);
      for (int r = 0; r < n; ++r) s(r, i) = rng.uniform() < sigmoid(2.0 * h(r)) ? 1.0 : -1.0;
    }
  return s;
}

// Exact sampling when the state space is enumerable (< 2^10 states), Gibbs with
// 10 * n_spins burn-in sweeps plus n_spins thinning sweeps otherwise.
inline Matrix ising_sample(Rng& rng, const IsingGraph& g, const Vector& couplings, int n) {
  if (g.n_spins <= 9) {
    IsingExact model = ising_enumerate(g, couplings);
    return ising_exact_sample(rng, model, n);
  }
  return ising_gibbs_sample(rng, g, couplings, n, 11 * g.n_spins);
}

// ---------------------------------------------------------------------------
// Composite likelihood: L(K) = E[sum_i log sigmoid(2 S_i h_i)], h = K S.

// Exact per-sample composite gradient, averaged over rows of s:
//   dL/dK_ij = E[2 S_i S_j sigmoid(-2 S_i h_i)] + E[2 S_i S_j sigmoid(-2 S_j h_j)].
inline Vector composite_gradient_samples(const Matrix& s, const IsingGraph& g, const Vector& k) {
  const Eigen::Index n = s.rows();
  const int d = g.n_spins;
  if (s.cols() != d) throw invalid_input("composite_gradient_samples: spin count mismatch");
  Matrix km = Matrix::Zero(d, d);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    km(i, j) = km(j, i) = k(e);
  }
  const Matrix h = s * km;
  Vector out(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    double acc = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double sij = 2.0 * s(r, i) * s(r, j);
      acc += sij * (sigmoid(-2.0 * s(r, i) * h(r, i)) + sigmoid(-2.0 * s(r, j) * h(r, j)));
    }
    out(e) = acc / static_cast<double>(n);
  }
  return out;
}

// Same gradient with the expectation taken over an enumerated distribution.
inline Vector composite_gradient_exact(const IsingExact& model, const IsingGraph& g,
                                       const Vector& k) {
  const int d = g.n_spins;
  Matrix km = Matrix::Zero(d, d);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    km(i, j) = km(j, i) = k(e);
  }
  const Matrix h = model.states * km;
  Vector out(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    double acc = 0.0;
    for (Eigen::Index s = 0; s < model.states.rows(); ++s) {
      const double sij = 2.0 * model.states(s, i) * model.states(s, j);
      acc += model.probs(s) * sij *
             (sigmoid(-2.0 * model.states(s, i) * h(s, i)) +
              sigmoid(-2.0 * model.states(s, j) * h(s, j)));
    }
    out(e) = acc;
  }
  return out;
}

using Moment4Fn = std::function<double(int, int, int, int)>;

// Degree-4 Taylor expansion of the composite gradient around K = 0 in terms of
// second and fourth moments only:
//   g_ij = 2 m2(i,j) - sum_{k in N(i)} K_ik m4(i,i,j,k)
//                    - sum_{k in N(j)} K_jk m4(j,j,i,k).
// Spins enter through moment estimates of products, so S_i^2 = 1 identities are
// not substituted; every m4 entry is read from the accessor literally.
inline Vector ising_composite_gradient(const Matrix& m2, const Moment4Fn& m4,
                                       const IsingGraph& g, const Vector& k) {
  if (m2.rows() != g.n_spins || m2.cols() != g.n_spins)
    throw invalid_input("ising_composite_gradient: m2 shape mismatch");
  if (k.size() != static_cast<Eigen::Index>(g.edges.size()))
    throw invalid_input("ising_composite_gradient: coupling count mismatch");
  Vector out(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    double v = 2.0 * m2(i, j);
    for (int nb : g.neighbors[i]) v -= k(g.index(i, nb)) * m4(i, i, j, nb);
    for (int nb : g.neighbors[j]) v -= k(g.index(j, nb)) * m4(j, j, i, nb);
    out(e) = v;
  }
  return out;
}

// The quadratic objective whose gradient the Taylor-4 expansion is:
//   L(K) = 2 sum_e K_e m2(i_e, j_e)
//        - 1/2 sum_i sum_{j,k in N(i)} K_ij K_ik m4(i,i,j,k).
inline double taylor_composite_objective(const Matrix& m2, const Moment4Fn& m4,
                                         const IsingGraph& g, const Vector& k) {
  double out = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    out += 2.0 * k(e) * m2(i, j);
  }
  for (int i = 0; i < g.n_spins; ++i)
    for (int j : g.neighbors[i])
      for (int kk : g.neighbors[i])
        out -= 0.5 * k(g.index(i, j)) * k(g.index(i, kk)) * m4(i, i, j, kk);
  return out;
}

// Index quadruples (v, v, a, b) with a, b neighbors of v — exactly the fourth
// moments the Taylor-4 gradient and objective read on this graph.
inline std::vector<std::array<int, 4>> taylor_quads(const IsingGraph& g) {
  std::vector<std::array<int, 4>> quads;
  for (int v = 0; v < g.n_spins; ++v)
    for (int a : g.neighbors[v])
      for (int b : g.neighbors[v]) quads.push_back({v, v, a, b});
  std::sort(quads.begin(), quads.end());
  quads.erase(std::unique(quads.begin(), quads.end()), quads.end());
  return quads;
}

// Signal moments restricted to the Taylor-4 index set.
struct ProjectedMoments {
  Matrix m2;
  std::map<std::array<int, 4>, double> m4;

  double m4_at(int i, int j, int k, int l) const {
    auto it = m4.find({i, j, k, l});
    if (it == m4.end()) throw invalid_input("ProjectedMoments: missing fourth-moment entry");
    return it->second;
  }
  Moment4Fn m4_fn() const {
    return [this](int i, int j, int k, int l) { return m4_at(i, j, k, l); };
  }
};

// Extract the signal's second moment and the projected fourth moments from one
// centered batch of the two views (uc = centered U rows, wc = centered pinv(A)V
// rows). Per entry: kappa_4(S1) = kappa_4(U) - pattern-averaged kappa_4(S2)
// over the 14 proper mixed slot patterns, then m4 = kappa_4 + the three
// kappa_2 pairings (zero-mean reconstruction).
inline ProjectedMoments extract_projected_moments(const Matrix& uc, const Matrix& wc,
                                                  const std::vector<std::array<int, 4>>& quads) {
  const Eigen::Index b = uc.rows();
  const int d = static_cast<int>(uc.cols());
  if (wc.rows() != b || wc.cols() != d)
    throw invalid_input("extract_projected_moments: view shapes differ");
  const double bn = static_cast<double>(b);
  const Matrix k2uu = uc.transpose() * uc / bn;
  const Matrix k2uw = uc.transpose() * wc / bn;
  const Matrix k2ww = wc.transpose() * wc / bn;

  ProjectedMoments out;
  out.m2 = k2uu - 0.5 * (k2uw + k2uw.transpose());

  auto pair_mean = [&](int src_a, int ia, int src_b, int ib) {
    if (src_a == 0 && src_b == 0) return k2uu(ia, ib);
    if (src_a == 1 && src_b == 1) return k2ww(ia, ib);
    return src_a == 0 ? k2uw(ia, ib) : k2uw(ib, ia);
  };

  for (const auto& q : quads) {
    double k4u = 0.0, k4s2 = 0.0;
    for (int mask = 0; mask < 15; ++mask) {
      int src[4];
      for (int s = 0; s < 4; ++s) src[s] = (mask >> s) & 1;
      const auto col = [&](int s) {
        return (src[s] ? wc : uc).col(q[s]).array();
      };
      const double mfull = (col(0) * col(1) * col(2) * col(3)).mean();
      const double k4 = mfull - pair_mean(src[0], q[0], src[1], q[1]) * pair_mean(src[2], q[2], src[3], q[3]) -
                        pair_mean(src[0], q[0], src[2], q[2]) * pair_mean(src[1], q[1], src[3], q[3]) -
                        pair_mean(src[0], q[0], src[3], q[3]) * pair_mean(src[1], q[1], src[2], q[2]);
      if (mask == 0)
        k4u = k4;
      else
        k4s2 += k4;
    }
    const double k4s1 = k4u - k4s2 / 14.0;
    out.m4[q] = k4s1 + out.m2(q[0], q[1]) * out.m2(q[2], q[3]) +
                out.m2(q[0], q[2]) * out.m2(q[1], q[3]) +
                out.m2(q[0], q[3]) * out.m2(q[1], q[2]);
  }
  return out;
}

struct IsingSgdOptions {
  int steps = 200;
  double step = 0.1;
  int batch = 100;
};

struct IsingFitResult {
  Vector couplings;
  std::vector<double> grad_norms;
};

namespace detail {

inline std::vector<int> batch_indices(Rng& rng, Eigen::Index n, int batch) {
  std::vector<int> idx(batch);
  for (int i = 0; i < batch; ++i) idx[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  return idx;
}

inline Matrix take_rows_centered(const Matrix& x, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return centered(out);
}

}  // namespace detail

// Stochastic ascent of the exact composite likelihood on raw samples; the
// baseline fit for arms that observe spins directly.
inline IsingFitResult ising_sgd_exact(const Matrix& s, const IsingGraph& g,
                                      const IsingSgdOptions& opts, Rng& rng) {
  if (s.rows() < 1 || opts.batch < 1 || opts.steps < 1)
    throw invalid_input("ising_sgd_exact: bad sizes");
  Vector k = Vector::Zero(static_cast<Eigen::Index>(g.edges.size()));
  IsingFitResult out;
  for (int step = 0; step < opts.steps; ++step) {
    const auto idx = detail::batch_indices(rng, s.rows(), opts.batch);
    Matrix batch(static_cast<Eigen::Index>(idx.size()), s.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
      batch.row(static_cast<Eigen::Index>(i)) = s.row(idx[i]);
    const Vector grad = composite_gradient_samples(batch, g, k);
    out.grad_norms.push_back(grad.norm());
    k += opts.step * grad;
  }
  out.couplings = std::move(k);
  return out;
}

// Stochastic ascent of the Taylor-4 composite likelihood where every moment is
// re-extracted from a fresh batch of the two views: couplings are inferred for
// the hidden signal without ever observing its samples.
inline IsingFitResult contrastive_ising(const Matrix& u, const Matrix& v, const Matrix& a,
                                        const IsingGraph& g, const IsingSgdOptions& opts,
                                        Rng& rng, double rank_tol = 1e-10) {
  if (u.rows() != v.rows()) throw invalid_input("contrastive_ising: sample counts differ");
  if (u.cols() != g.n_spins) throw invalid_input("contrastive_ising: spin count mismatch");
  if (opts.batch < 5) throw invalid_input("contrastive_ising: batch too small");
  const Matrix uc_full = centered(u);
  const Matrix w_full = centered(v) * pinv(a, rank_tol).transpose();
  const auto quads = taylor_quads(g);

  Vector k = Vector::Zero(static_cast<Eigen::Index>(g.edges.size()));
  IsingFitResult out;
  for (int step = 0; step < opts.steps; ++step) {
    const auto idx = detail::batch_indices(rng, u.rows(), opts.batch);
    const Matrix ub = detail::take_rows_centered(uc_full, idx);
    const Matrix wb = detail::take_rows_centered(w_full, idx);
    const ProjectedMoments moments = extract_projected_moments(ub, wb, quads);
    const Vector grad = ising_composite_gradient(moments.m2, moments.m4_fn(), g, k);
    out.grad_norms.push_back(grad.norm());
    k += opts.step * grad;
  }
  out.couplings = std::move(k);
  return out;
}

}  // namespace rca
