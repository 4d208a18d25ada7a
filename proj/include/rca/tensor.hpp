#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rca/errors.hpp"

namespace rca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense tensor of arbitrary order with row-major layout: the last index varies
// fastest, so flattening merges leading modes first. Orders up to 6 in practice.
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<int> dims) : dims_(std::move(dims)) {
    std::size_t n = 1;
    for (int d : dims_) {
      if (d <= 0) throw invalid_input("DenseTensor: dimensions must be positive");
      n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, 0.0);
  }

  // Order-t cube with all dimensions equal to d.
  static DenseTensor cube(int t, int d) { return DenseTensor(std::vector<int>(t, d)); }

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::size_t offset(const std::vector<int>& idx) const {
    std::size_t off = 0;
    for (int m = 0; m < order(); ++m) off = off * static_cast<std::size_t>(dims_[m]) + idx[m];
    return off;
  }
  double& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
  double at(const std::vector<int>& idx) const { return data_[offset(idx)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  DenseTensor& operator+=(const DenseTensor& o) {
    check_same_dims(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    check_same_dims(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  DenseTensor& operator*=(double c) {
    for (double& x : data_) x *= c;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, double c) { return a *= c; }
  friend DenseTensor operator*(double c, DenseTensor a) { return a *= c; }

  double norm() const {
    double s = 0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }
  double max_abs() const {
    double s = 0;
    for (double x : data_) s = std::max(s, std::abs(x));
    return s;
  }

 private:
  void check_same_dims(const DenseTensor& o) const {
    if (dims_ != o.dims_) throw invalid_input("DenseTensor: dimension mismatch");
  }

  std::vector<int> dims_;
  std::vector<double> data_;
};

inline Matrix as_matrix(const DenseTensor& t) {
  if (t.order() != 2) throw invalid_input("as_matrix: tensor order must be 2");
  Matrix out(t.dims()[0], t.dims()[1]);
  for (int i = 0; i < t.dims()[0]; ++i)
    for (int j = 0; j < t.dims()[1]; ++j)
      out(i, j) = t.data()[static_cast<std::size_t>(i) * t.dims()[1] + j];
  return out;
}

inline Vector as_vector(const DenseTensor& t) {
  if (t.order() != 1) throw invalid_input("as_vector: tensor order must be 1");
  return Eigen::Map<const Vector>(t.data(), t.dims()[0]);
}

inline DenseTensor from_matrix(const Matrix& m) {
  DenseTensor out(std::vector<int>{static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  return out;
}

// Flatten the first t-1 modes into rows; the last mode indexes columns. With the
// row-major layout this is a plain reshape.
inline Matrix unfold(const DenseTensor& t) {
  if (t.order() < 2) throw invalid_input("unfold: tensor order must be at least 2");
  const int cols = t.dims().back();
  const Eigen::Index rows = static_cast<Eigen::Index>(t.size()) / cols;
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(t.data(), rows, cols);
}

// Inverse of unfold for the given tensor dimensions (bit-exact round trip).
inline DenseTensor refold(const Matrix& m, const std::vector<int>& dims) {
  DenseTensor out(dims);
  if (dims.empty() || m.rows() * m.cols() != static_cast<Eigen::Index>(out.size()) ||
      m.cols() != dims.back())
    throw invalid_input("refold: shape mismatch");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  return out;
}

// out[..., r, ...] = sum_c map(r, c) * t[..., c, ...] along the given mode.
inline DenseTensor mode_apply(const DenseTensor& t, const Matrix& map, int mode) {
  if (mode < 0 || mode >= t.order()) throw invalid_input("mode_apply: mode out of range");
  if (map.cols() != t.dims()[mode]) throw invalid_input("mode_apply: map shape mismatch");
  std::vector<int> od = t.dims();
  od[mode] = static_cast<int>(map.rows());
  DenseTensor out(od);

  std::size_t inner = 1;
  for (int m = mode + 1; m < t.order(); ++m) inner *= t.dims()[m];
  std::size_t outer = 1;
  for (int m = 0; m < mode; ++m) outer *= t.dims()[m];

  const int dm = t.dims()[mode];
  const int rm = static_cast<int>(map.rows());
  for (std::size_t o = 0; o < outer; ++o) {
    for (int c = 0; c < dm; ++c) {
      const double* src = t.data() + (o * dm + c) * inner;
      for (int r = 0; r < rm; ++r) {
        const double w = map(r, c);
        if (w == 0.0) continue;
        double* dst = out.data() + (o * rm + r) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
    }
  }
  return out;
}

// Cumulant/moment transform under linear maps: given the tensor of (X_1,...,X_t),
// returns the tensor of (maps[0] X_1, ..., maps[t-1] X_t). Exact multilinearity.
inline DenseTensor push_through_maps(const DenseTensor& t, const std::vector<Matrix>& maps) {
  if (static_cast<int>(maps.size()) != t.order())
    throw invalid_input("push_through_maps: one map per mode required");
  DenseTensor out = t;
  for (int m = 0; m < t.order(); ++m) out = mode_apply(out, maps[m], m);
  return out;
}

// Multilinear form T(M_1,...,M_t): mode l contracted against the rows of M_l,
// so the output dimensions are the maps' column counts. For order 2 this is
// M_1^T T M_2, and E[X^(t)](M_1,...,M_t) equals the moment tensor of (M_l^T X).
inline DenseTensor multilinear_apply(const DenseTensor& t, const std::vector<Matrix>& maps) {
  if (static_cast<int>(maps.size()) != t.order())
    throw invalid_input("multilinear_apply: one map per mode required");
  DenseTensor out = t;
  for (int m = 0; m < t.order(); ++m) out = mode_apply(out, maps[m].transpose(), m);
  return out;
}

// Kronecker product: (mp)x(nq) block matrix with blocks a(i,j) * b.
inline Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double frobenius_norm(const DenseTensor& t) { return t.norm(); }

inline double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) throw invalid_input("smallest_singular_value: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Average over all mode permutations. Requires a cube tensor.
inline DenseTensor symmetrize(const DenseTensor& t) {
  const int order = t.order();
  for (int d : t.dims())
    if (d != t.dims()[0]) throw invalid_input("symmetrize: all dimensions must match");
  if (order <= 1) return t;

  std::vector<int> perm(order);
  for (int m = 0; m < order; ++m) perm[m] = m;
  DenseTensor out(t.dims());
  const int d = t.dims()[0];
  std::vector<int> idx(order), src(order);
  int count = 0;
  do {
    ++count;
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      for (int m = 0; m < order; ++m) src[m] = idx[perm[m]];
      out[flat] += t.at(src);
      for (int m = order - 1; m >= 0; --m) {
        if (++idx[m] < d) break;
        idx[m] = 0;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= 1.0 / count;
  return out;
}

// Contract every mode in `modes` with the vector v (all those dimensions must equal
// v.size()); the remaining modes keep their order.
inline DenseTensor contract_modes(const DenseTensor& t, const std::vector<int>& modes,
                                  const Vector& v) {
  Matrix row = v.transpose();
  DenseTensor out = t;
  // Apply back to front so earlier mode indices stay valid, then drop unit modes.
  std::vector<int> sorted = modes;
  std::sort(sorted.begin(), sorted.end(), std::greater<int>());
  for (int m : sorted) out = mode_apply(out, row, m);
  // Contracted modes now have extent 1; dropping them keeps the flat layout intact.
  std::vector<int> kept;
  for (int m = 0; m < out.order(); ++m)
    if (std::find(sorted.begin(), sorted.end(), m) == sorted.end())
      kept.push_back(out.dims()[m]);
  if (kept.empty()) kept.push_back(1);
  DenseTensor shaped(kept);
  for (std::size_t i = 0; i < out.size(); ++i) shaped[i] = out[i];
  return shaped;
}

}  // namespace rca
