#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlab/errors.hpp"

namespace rlab {

// Forward-mode dual number: value plus directional tangent. Pushing duals
// through the reverse sweep yields the directional second derivatives the
// gradient penalty needs.
struct Dual {
  double v = 0.0;
  double t = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT implicit by design
  constexpr Dual(double value, double tangent) : v(value), t(tangent) {}

  Dual& operator+=(Dual o) {
    v += o.v;
    t += o.t;
    return *this;
  }
  Dual& operator-=(Dual o) {
    v -= o.v;
    t -= o.t;
    return *this;
  }
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.t + b.t}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.t - b.t}; }
inline Dual operator-(Dual a) { return {-a.v, -a.t}; }
inline Dual operator*(Dual a, Dual b) {
  return {a.v * b.v, a.t * b.v + a.v * b.t};
}
inline Dual operator/(Dual a, Dual b) {
  const double q = a.v / b.v;
  return {q, (a.t - q * b.t) / b.v};
}
inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }
inline bool operator==(Dual a, Dual b) { return a.v == b.v && a.t == b.t; }

inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, a.t * e};
}
inline Dual log(Dual a) { return {std::log(a.v), a.t / a.v}; }
inline Dual tanh(Dual a) {
  const double th = std::tanh(a.v);
  return {th, a.t * (1.0 - th * th)};
}
inline Dual pow(Dual a, double e) {
  return {std::pow(a.v, e), a.t * e * std::pow(a.v, e - 1.0)};
}
inline Dual abs(Dual a) {
  const double s = a.v < 0.0 ? -1.0 : 1.0;
  return {std::abs(a.v), s * a.t};
}

inline double primal(double x) { return x; }
inline double primal(Dual x) { return x.v; }

// double twins of the Dual math so templated code resolves either scalar.
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double pow(double x, double e) { return std::pow(x, e); }
inline double abs(double x) { return std::fabs(x); }

// Dense row-major rank-2 tensor; vectors are 1 x n, scalars 1 x 1.
template <typename S = double>
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<S> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}
  Tensor(int r, int c, std::vector<S> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (static_cast<std::size_t>(r) * c != data.size())
      throw ShapeMismatch("tensor data does not match shape");
  }

  static Tensor scalar(S value) {
    Tensor t(1, 1);
    t.data[0] = value;
    return t;
  }

  int size() const { return rows * cols; }
  S& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const S& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  S& operator[](std::size_t i) { return data[i]; }
  const S& operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

inline std::string shape_string(int r, int c) {
  return "[" + std::to_string(r) + " x " + std::to_string(c) + "]";
}

// C += A * B. Eigen handles the double case; the generic loop covers duals.
inline void matmul_accumulate(const Tensor<double>& a, const Tensor<double>& b,
                              Tensor<double>& c) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> ma(a.data.data(), a.rows, a.cols);
  Eigen::Map<const Mat> mb(b.data.data(), b.rows, b.cols);
  Eigen::Map<Mat> mc(c.data.data(), c.rows, c.cols);
  mc.noalias() += ma * mb;
}

template <typename S>
void matmul_accumulate(const Tensor<S>& a, const Tensor<S>& b, Tensor<S>& c) {
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const S aik = a.at(i, k);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
}

// C += A^T * B
inline void matmul_at_b_accumulate(const Tensor<double>& a,
                                   const Tensor<double>& b, Tensor<double>& c) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> ma(a.data.data(), a.rows, a.cols);
  Eigen::Map<const Mat> mb(b.data.data(), b.rows, b.cols);
  Eigen::Map<Mat> mc(c.data.data(), c.rows, c.cols);
  mc.noalias() += ma.transpose() * mb;
}

template <typename S>
void matmul_at_b_accumulate(const Tensor<S>& a, const Tensor<S>& b,
                            Tensor<S>& c) {
  for (int k = 0; k < a.rows; ++k) {
    for (int i = 0; i < a.cols; ++i) {
      const S aki = a.at(k, i);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aki * b.at(k, j);
    }
  }
}

// C += A * B^T
inline void matmul_a_bt_accumulate(const Tensor<double>& a,
                                   const Tensor<double>& b, Tensor<double>& c) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> ma(a.data.data(), a.rows, a.cols);
  Eigen::Map<const Mat> mb(b.data.data(), b.rows, b.cols);
  Eigen::Map<Mat> mc(c.data.data(), c.rows, c.cols);
  mc.noalias() += ma * mb.transpose();
}

template <typename S>
void matmul_a_bt_accumulate(const Tensor<S>& a, const Tensor<S>& b,
                            Tensor<S>& c) {
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < b.rows; ++j) {
      S sum{};
      for (int k = 0; k < a.cols; ++k) sum += a.at(i, k) * b.at(j, k);
      c.at(i, j) += sum;
    }
  }
}

}  // namespace rlab
