#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "pseudoq/errors.hpp"
#include "pseudoq/matrix.hpp"

namespace pseudoq {

inline Complex determinant(const Mat2& m) {
  require_finite(m, "determinant input");
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

namespace detail {

inline Complex det3(const Mat4& m, std::size_t r0, std::size_t r1,
                    std::size_t r2, std::size_t c0, std::size_t c1,
                    std::size_t c2) {
  return m(r0, c0) * (m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1)) -
         m(r0, c1) * (m(r1, c0) * m(r2, c2) - m(r1, c2) * m(r2, c0)) +
         m(r0, c2) * (m(r1, c0) * m(r2, c1) - m(r1, c1) * m(r2, c0));
}

}  // namespace detail

inline Complex determinant(const Mat4& m) {
  require_finite(m, "determinant input");
  Complex d = 0.0;
  d += m(0, 0) * detail::det3(m, 1, 2, 3, 1, 2, 3);
  d -= m(0, 1) * detail::det3(m, 1, 2, 3, 0, 2, 3);
  d += m(0, 2) * detail::det3(m, 1, 2, 3, 0, 1, 3);
  d -= m(0, 3) * detail::det3(m, 1, 2, 3, 0, 1, 2);
  return d;
}

namespace detail {

// Cyclic Jacobi on the leading n×n block of a Hermitian matrix held in a
// 4-capacity buffer. Rotations accumulate into v (same active block). For
// real symmetric input every rotation stays real, so v comes out real
// orthogonal; this is relied on by takagi().
using Buf4 = std::array<std::array<Complex, 4>, 4>;

inline void jacobi_hermitian(Buf4& h, Buf4& v, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[i][j] = (i == j) ? 1.0 : 0.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(h[i][j]));
  if (scale == 0.0) return;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(h[p][q]));
    if (off <= 1e-15 * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex b = h[p][q];
        const double mag = std::abs(b);
        if (mag == 0.0) continue;
        const Complex u = b / mag;
        const double tau = (h[q][q].real() - h[p][p].real()) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const Complex hkp = h[k][p], hkq = h[k][q];
          h[k][p] = c * hkp - s * std::conj(u) * hkq;
          h[k][q] = s * u * hkp + c * hkq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex hpk = h[p][k], hqk = h[q][k];
          h[p][k] = c * hpk - s * u * hqk;
          h[q][k] = s * std::conj(u) * hpk + c * hqk;
        }
        for (int k = 0; k < n; ++k) {
          const Complex vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * std::conj(u) * vkq;
          v[k][q] = s * u * vkp + c * vkq;
        }
      }
    }
  }
}

template <std::size_t N>
std::array<std::size_t, N> descending_order(const std::array<double, N>& x) {
  std::array<std::size_t, N> idx{};
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return idx;
}

}  // namespace detail

template <std::size_t N>
struct EigResult {
  std::array<double, N> values;  // descending
  Matrix<N> vectors;             // columns are the eigenvectors
};

template <std::size_t N>
EigResult<N> hermitian_eig(const Matrix<N>& m) {
  require_finite(m, "hermitian_eig input");
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.adjoint()) > tol::structural * scale)
    throw Error(Errc::NotHermitian, "hermitian_eig input is not Hermitian");

  const Matrix<N> h0 = 0.5 * (m + m.adjoint());
  detail::Buf4 h{}, v{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) h[i][j] = h0(i, j);
  detail::jacobi_hermitian(h, v, static_cast<int>(N));

  std::array<double, N> vals{};
  for (std::size_t i = 0; i < N; ++i) vals[i] = h[i][i].real();
  const auto order = detail::descending_order(vals);

  EigResult<N> r;
  for (std::size_t k = 0; k < N; ++k) {
    r.values[k] = vals[order[k]];
    for (std::size_t i = 0; i < N; ++i) r.vectors(i, k) = v[i][order[k]];
  }
  return r;
}

template <std::size_t N>
struct SvdResult {
  Matrix<N> u;
  std::array<double, N> s;  // descending, nonnegative
  Matrix<N> v;
};

// One-sided Jacobi: orthogonalize the columns of M by right rotations.
template <std::size_t N>
SvdResult<N> svd(const Matrix<N>& m) {
  require_finite(m, "svd input");
  Matrix<N> a = m;
  Matrix<N> v = Matrix<N>::identity();

  for (int sweep = 0; sweep < 64; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        double app = 0.0, aqq = 0.0;
        Complex g = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
          app += std::norm(a(k, p));
          aqq += std::norm(a(k, q));
          g += std::conj(a(k, p)) * a(k, q);
        }
        const double mag = std::abs(g);
        if (mag <= 1e-15 * std::sqrt(app * aqq) || mag == 0.0) continue;
        rotated = true;
        const Complex u = g / mag;
        const double tau = (aqq - app) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(u) * akq;
          a(k, q) = s * u * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(u) * vkq;
          v(k, q) = s * u * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::array<double, N> s{};
  for (std::size_t j = 0; j < N; ++j) s[j] = norm2(a.col(j));
  const auto order = detail::descending_order(s);

  SvdResult<N> r;
  r.v = Matrix<N>();
  for (std::size_t k = 0; k < N; ++k) {
    r.s[k] = s[order[k]];
    r.v.set_col(k, v.col(order[k]));
  }

  const double cutoff = r.s[0] * 1e-14;
  std::array<bool, N> have{};
  for (std::size_t k = 0; k < N; ++k) {
    if (r.s[k] > cutoff && r.s[k] > 0.0) {
      Vector<N> col = a.col(order[k]);
      col *= Complex(1.0 / r.s[k]);
      r.u.set_col(k, col);
      have[k] = true;
    }
  }
  // Orthonormal completion for (near-)null columns.
  for (std::size_t k = 0; k < N; ++k) {
    if (have[k]) continue;
    Vector<N> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < N; ++e) {
      Vector<N> cand;
      cand[e] = 1.0;
      for (std::size_t j = 0; j < N; ++j) {
        if (j == k || !have[j]) continue;
        const Vector<N> uj = r.u.col(j);
        cand -= dot(uj, cand) * uj;
      }
      const double n2 = norm2(cand);
      if (n2 > best_norm) {
        best_norm = n2;
        best = cand;
      }
    }
    best *= Complex(1.0 / norm2(best));
    r.u.set_col(k, best);
    have[k] = true;
  }
  return r;
}

template <std::size_t N>
Matrix<N> psd_sqrt(const Matrix<N>& m) {
  const EigResult<N> e = hermitian_eig(m);
  Matrix<N> r;
  for (std::size_t i = 0; i < N; ++i) {
    double lam = e.values[i];
    if (lam < -tol::hard)
      throw Error(Errc::NotPsd, "psd_sqrt eigenvalue below -1e-8");
    lam = std::max(lam, 0.0);
    const Vector<N> col = e.vectors.col(i);
    r += Complex(std::sqrt(lam)) * outer(col, col);
  }
  return 0.5 * (r + r.adjoint());
}

struct PolarResult {
  Mat4 p;  // Hermitian PSD
  Mat4 u;  // unitary
};

inline PolarResult polar_decompose(const Mat4& r) {
  require_finite(r, "polar_decompose input");
  if (std::abs(determinant(r)) <= 1e-12)
    throw Error(Errc::Singular, "polar_decompose requires |det| > 1e-12");
  const SvdResult<4> f = svd(r);
  Mat4 p;
  for (std::size_t i = 0; i < 4; ++i) {
    const StateVector col = f.u.col(i);
    p += Complex(f.s[i]) * outer(col, col);
  }
  p = 0.5 * (p + p.adjoint());
  return {p, f.u * f.v.adjoint()};
}

struct TakagiResult {
  Mat4 w;                   // unitary
  std::array<double, 4> d;  // descending, nonnegative
};

namespace detail {

// Simultaneous real-orthogonal diagonalization of commuting real symmetric
// X, Y held as the real/imaginary parts of a symmetric unitary block:
// diagonalize X, then Y restricted to each eigenvalue cluster of X.
inline void diagonalize_symmetric_unitary(Buf4& z, Buf4& q, int n) {
  Buf4 x{}, qx{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x[i][j] = 0.5 * (z[i][j].real() + z[j][i].real());
  jacobi_hermitian(x, qx, n);

  // Jacobi leaves the eigenvalues unordered; sort so equal ones are adjacent.
  {
    std::array<int, 4> ord{0, 1, 2, 3};
    std::stable_sort(ord.begin(), ord.begin() + n, [&x](int a, int b) {
      return x[a][a].real() > x[b][b].real();
    });
    Buf4 xs{}, qs{};
    for (int k = 0; k < n; ++k) {
      xs[k][k] = x[ord[k]][ord[k]];
      for (int i = 0; i < n; ++i) qs[i][k] = qx[i][ord[k]];
    }
    x = xs;
    qx = qs;
  }

  // Y in the X-eigenbasis.
  Buf4 y{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          acc += qx[k][i] * Complex(0.5 * (z[k][l].imag() + z[l][k].imag())) *
                 qx[l][j];
      y[i][j] = acc.real();
    }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q[i][j] = qx[i][j];

  // Walk clusters of (near-)equal X eigenvalues.
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n &&
           std::abs(x[stop][stop].real() - x[start][start].real()) <= 1e-8)
      ++stop;
    const int g = stop - start;
    if (g > 1) {
      Buf4 yg{}, qy{};
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) yg[i][j] = y[start + i][start + j];
      jacobi_hermitian(yg, qy, g);
      Buf4 qnew = q;
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < g; ++j) {
          Complex acc = 0.0;
          for (int i = 0; i < g; ++i) acc += q[k][start + i] * qy[i][j];
          qnew[k][start + j] = acc;
        }
      q = qnew;
    }
    start = stop;
  }
}

}  // namespace detail

// Autonne-Takagi factorization M = W diag(d) Wᵀ of a complex symmetric M.
// Built on the SVD: Z = U†·conj(V) commutes with diag(s)², hence is
// block-diagonal symmetric unitary over clusters of equal singular values;
// each block is absorbed as a square-rooted phase correction into U.
inline TakagiResult takagi(const Mat4& m) {
  require_finite(m, "takagi input");
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > tol::structural * scale)
    throw Error(Errc::NotSymmetric, "takagi input is not complex symmetric");
  const Mat4 sym = 0.5 * (m + m.transpose());

  const SvdResult<4> f = svd(sym);
  TakagiResult r;
  r.d = f.s;
  r.w = f.u;
  const double smax = f.s[0];
  if (smax == 0.0) {
    r.w = Mat4::identity();
    return r;
  }

  const Mat4 z = f.u.adjoint() * f.v.conj();
  const double zero_cut = 1e-13 * smax;
  const double gap = 1e-7 * smax;

  std::size_t start = 0;
  while (start < 4) {
    std::size_t stop = start + 1;
    while (stop < 4 && f.s[stop - 1] - f.s[stop] <= gap) ++stop;
    if (f.s[start] <= zero_cut) {
      start = stop;
      continue;  // null block: no phase correction needed
    }
    const int g = static_cast<int>(stop - start);
    if (g == 1) {
      Complex zk = z(start, start);
      const double az = std::abs(zk);
      const Complex ph = az > 0.5 ? std::sqrt(zk / az) : Complex(1.0);
      for (std::size_t i = 0; i < 4; ++i) r.w(i, start) = f.u(i, start) * ph;
    } else {
      detail::Buf4 zg{}, q{};
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
          zg[i][j] = 0.5 * (z(start + i, start + j) + z(start + j, start + i));
      detail::diagonalize_symmetric_unitary(zg, q, g);
      // Phases of Qᵀ Z_g Q, halved.
      std::array<Complex, 4> ph{};
      for (int k = 0; k < g; ++k) {
        Complex acc = 0.0;
        for (int i = 0; i < g; ++i)
          for (int j = 0; j < g; ++j) acc += q[i][k] * zg[i][j] * q[j][k];
        const double az = std::abs(acc);
        ph[k] = az > 0.5 ? std::sqrt(acc / az) : Complex(1.0);
      }
      for (std::size_t col = 0; col < static_cast<std::size_t>(g); ++col)
        for (std::size_t i = 0; i < 4; ++i) {
          Complex acc = 0.0;
          for (int rrow = 0; rrow < g; ++rrow)
            acc += f.u(i, start + rrow) * q[rrow][col];
          r.w(i, start + col) = acc * ph[col];
        }
    }
    start = stop;
  }
  return r;
}

}  // namespace pseudoq
