#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "pseudoq/errors.hpp"

namespace pseudoq {

using Complex = std::complex<double>;

// Dense column vector of fixed dimension. Only N = 2 and N = 4 are used;
// everything is stack-allocated and unrolled by the optimizer.
template <std::size_t N>
class Vector {
 public:
  Vector() : a_{} {}

  Complex& operator[](std::size_t i) { return a_[i]; }
  const Complex& operator[](std::size_t i) const { return a_[i]; }

  static constexpr std::size_t size() { return N; }

  Vector operator+(const Vector& o) const {
    Vector r;
    for (std::size_t i = 0; i < N; ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }
  Vector operator-(const Vector& o) const {
    Vector r;
    for (std::size_t i = 0; i < N; ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  Vector operator-() const {
    Vector r;
    for (std::size_t i = 0; i < N; ++i) r.a_[i] = -a_[i];
    return r;
  }
  Vector& operator+=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Vector& operator*=(Complex z) {
    for (std::size_t i = 0; i < N; ++i) a_[i] *= z;
    return *this;
  }
  friend Vector operator*(Complex z, Vector v) {
    v *= z;
    return v;
  }

 private:
  std::array<Complex, N> a_;
};

// Dense square matrix, row-major.
template <std::size_t N>
class Matrix {
 public:
  Matrix() : a_{} {}

  Complex& operator()(std::size_t r, std::size_t c) { return a_[r * N + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return a_[r * N + c];
  }

  static constexpr std::size_t size() { return N; }

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  Matrix operator+(const Matrix& o) const {
    Matrix r;
    for (std::size_t i = 0; i < N * N; ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }
  Matrix operator-(const Matrix& o) const {
    Matrix r;
    for (std::size_t i = 0; i < N * N; ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  Matrix operator-() const {
    Matrix r;
    for (std::size_t i = 0; i < N * N; ++i) r.a_[i] = -a_[i];
    return r;
  }
  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Matrix& operator*=(Complex z) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] *= z;
    return *this;
  }
  friend Matrix operator*(Complex z, Matrix m) {
    m *= z;
    return m;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const Complex v = (*this)(i, k);
        for (std::size_t j = 0; j < N; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  Vector<N> operator*(const Vector<N>& v) const {
    Vector<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Matrix transpose() const {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Matrix conj() const {
    Matrix r;
    for (std::size_t i = 0; i < N * N; ++i) r.a_[i] = std::conj(a_[i]);
    return r;
  }

  Matrix adjoint() const { return conj().transpose(); }

  Complex trace() const {
    Complex s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
    return s;
  }

  Vector<N> col(std::size_t j) const {
    Vector<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_col(std::size_t j, const Vector<N>& v) {
    for (std::size_t i = 0; i < N; ++i) (*this)(i, j) = v[i];
  }

 private:
  std::array<Complex, N * N> a_;
};

using Vec2 = Vector<2>;
using StateVector = Vector<4>;
using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;

// Global tolerance tiers. Structural preconditions are checked at
// `structural`, postconditions asserted at `post`, hard failures at `hard`.
// Ops that accept a caller tolerance default to one of these.
namespace tol {
inline constexpr double structural = 1e-10;
inline constexpr double post = 1e-9;
inline constexpr double hard = 1e-8;
}  // namespace tol

// Euclidean inner product <u|v>, conjugate-linear in the first argument.
template <std::size_t N>
inline Complex dot(const Vector<N>& u, const Vector<N>& v) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(u[i]) * v[i];
  return s;
}

template <std::size_t N>
inline double norm2(const Vector<N>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::norm(v[i]);
  return std::sqrt(s);
}

template <std::size_t N>
inline Vector<N> conj(const Vector<N>& v) {
  Vector<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = std::conj(v[i]);
  return r;
}

// |u><v|
template <std::size_t N>
inline Matrix<N> outer(const Vector<N>& u, const Vector<N>& v) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

template <std::size_t N>
inline double max_abs(const Vector<N>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

template <std::size_t N>
inline double max_abs(const Matrix<N>& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

// Index convention: row = 2*i + k, column = 2*j + l for A(i,j), B(k,l),
// so basis order is |00>, |01>, |10>, |11> with the first factor leftmost.
inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          m(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return m;
}

template <std::size_t N>
inline bool is_finite(const Vector<N>& v) {
  for (std::size_t i = 0; i < N; ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      return false;
  return true;
}

template <std::size_t N>
inline bool is_finite(const Matrix<N>& m) {
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

template <typename T>
inline void require_finite(const T& x, const char* what) {
  if (!is_finite(x))
    throw Error(Errc::NonFinite, std::string(what) + " has NaN/Inf entries");
}

}  // namespace pseudoq
