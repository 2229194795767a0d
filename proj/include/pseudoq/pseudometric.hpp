#pragma once

#include <array>
#include <cmath>

#include "pseudoq/decomp.hpp"
#include "pseudoq/errors.hpp"
#include "pseudoq/matrix.hpp"

namespace pseudoq {

// Sign convention for the state-level spin flip. With -1 the magic basis
// below is exactly self-dual; the opposite sign would flip every magic
// vector. Operator-level flips are unaffected (the sign enters twice).
inline constexpr double kFlipSign = -1.0;

// sign * (sigma_y (x) sigma_y) * conj(v). The matrix is the antidiagonal
// (-1, 1, 1, -1), so this unrolls to sign swaps of conjugated amplitudes.
inline StateVector spin_flip_state(const StateVector& v) {
  require_finite(v, "spin_flip_state input");
  StateVector r;
  r[0] = kFlipSign * -std::conj(v[3]);
  r[1] = kFlipSign * std::conj(v[2]);
  r[2] = kFlipSign * std::conj(v[1]);
  r[3] = kFlipSign * -std::conj(v[0]);
  return r;
}

// A-tilde = sigma_y conj(A) sigma_y.
inline Mat2 spin_flip_op2(const Mat2& a) {
  require_finite(a, "spin_flip_op2 input");
  Mat2 r;
  r(0, 0) = std::conj(a(1, 1));
  r(0, 1) = -std::conj(a(1, 0));
  r(1, 0) = -std::conj(a(0, 1));
  r(1, 1) = std::conj(a(0, 0));
  return r;
}

// R-tilde = (sigma_y (x) sigma_y) conj(R) (sigma_y (x) sigma_y).
// Entry (i,j) picks conj(R(3-i, 3-j)) with the antidiagonal sign pattern.
inline Mat4 spin_flip_op4(const Mat4& m) {
  require_finite(m, "spin_flip_op4 input");
  constexpr double f[4] = {-1.0, 1.0, 1.0, -1.0};
  Mat4 r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      r(i, j) = f[i] * f[j] * std::conj(m(3 - i, 3 - j));
  return r;
}

// C(v1, v2) = <v1|v2-tilde>. Complex symmetric: C(v1,v2) = C(v2,v1).
inline Complex pseudo_inner(const StateVector& v1, const StateVector& v2) {
  return dot(v1, spin_flip_state(v2));
}

struct PseudoBasis {
  std::array<StateVector, 4> vectors;
};

// Gram matrix of the pseudo inner product, G_ij = C(x_i, x_j).
inline Mat4 pseudo_gram(const PseudoBasis& b) {
  Mat4 g;
  for (std::size_t i = 0; i < 4; ++i) {
    const StateVector flipped = spin_flip_state(b.vectors[i]);
    for (std::size_t j = 0; j < 4; ++j) g(j, i) = dot(b.vectors[j], flipped);
  }
  return g;
}

inline bool is_pseudo_basis(const PseudoBasis& b, double tolerance = tol::post) {
  for (std::size_t i = 0; i < 4; ++i)
    if (!is_finite(b.vectors[i])) return false;
  return max_abs(pseudo_gram(b) - Mat4::identity()) < tolerance;
}

inline void require_pseudo_basis(const PseudoBasis& b, const char* what) {
  if (!is_pseudo_basis(b))
    throw Error(Errc::InvalidBasis,
                std::string(what) + ": pseudo Gram matrix is not the identity");
}

// Scales v by r e^{i theta}, r > 0, 0 <= theta < pi, so the pseudo norm
// becomes exactly 1; this pair is unique.
inline StateVector pseudo_normalize(const StateVector& v) {
  const Complex c = pseudo_inner(v, v);
  if (std::abs(c) <= 1e-10)
    throw Error(Errc::ZeroPseudoNorm,
                "pseudo norm vanishes (product-like direction)");
  const double r = 1.0 / std::sqrt(std::abs(c));
  double theta = 0.5 * std::arg(c);
  if (theta < 0.0) theta += M_PI;
  return Complex(r) * std::polar(1.0, theta) * v;
}

inline PseudoBasis magic_basis() {
  constexpr double s = M_SQRT1_2;
  const Complex is(0.0, s);
  PseudoBasis b;
  b.vectors[0][0] = s;
  b.vectors[0][3] = s;
  b.vectors[1][0] = is;
  b.vectors[1][3] = -is;
  b.vectors[2][1] = is;
  b.vectors[2][2] = is;
  b.vectors[3][1] = s;
  b.vectors[3][2] = -s;
  return b;
}

// Pseudo Schmidt orthogonalization: subtract |x_i><x_i-tilde| projections,
// then pseudo-normalize the residual. Fails fast with the 1-based step
// index when a residual is pseudo-null.
inline PseudoBasis pseudo_gram_schmidt(const std::array<StateVector, 4>& a) {
  Mat4 cols;
  for (std::size_t j = 0; j < 4; ++j) cols.set_col(j, a[j]);
  const SvdResult<4> f = svd(cols);
  if (f.s[3] <= 1e-10 * f.s[0] || f.s[0] == 0.0)
    throw Error(Errc::LinearlyDependent,
                "pseudo_gram_schmidt inputs are not linearly independent");

  PseudoBasis b;
  for (std::size_t n = 0; n < 4; ++n) {
    StateVector r = a[n];
    for (std::size_t i = 0; i < n; ++i) {
      const Complex coef = dot(spin_flip_state(b.vectors[i]), r);
      r -= coef * b.vectors[i];
    }
    try {
      b.vectors[n] = pseudo_normalize(r);
    } catch (const Error& e) {
      if (e.code() == Errc::ZeroPseudoNorm)
        throw Error(Errc::ZeroPseudoNorm, "residual is pseudo-null",
                    static_cast<int>(n) + 1);
      throw;
    }
  }
  return b;
}

inline double concurrence_pure(const StateVector& v) {
  require_finite(v, "concurrence_pure input");
  if (std::abs(norm2(v) - 1.0) > tol::post)
    throw Error(Errc::NotNormalized, "concurrence_pure needs a unit vector");
  return std::min(1.0, std::abs(pseudo_inner(v, v)));
}

// DensityMatrix validity: Hermitian, unit trace, spectrum >= -1e-10.
inline void validate_density(const Mat4& rho, const char* what) {
  require_finite(rho, what);
  if (max_abs(rho - rho.adjoint()) > tol::structural)
    throw Error(Errc::InvalidState, std::string(what) + ": not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > tol::structural)
    throw Error(Errc::InvalidState, std::string(what) + ": trace is not 1");
  const EigResult<4> e = hermitian_eig(rho);
  if (e.values[3] < -tol::structural)
    throw Error(Errc::InvalidState,
                std::string(what) + ": negative eigenvalue");
}

// Descending square roots of the eigenvalues of rho * rho-tilde, computed
// through the Hermitized form sqrt(rho) rho-tilde sqrt(rho).
inline std::array<double, 4> flip_spectrum(const Mat4& rho) {
  validate_density(rho, "flip_spectrum input");
  const Mat4 sq = psd_sqrt(rho);
  const Mat4 k = sq * spin_flip_op4(rho) * sq;
  const EigResult<4> e = hermitian_eig(0.5 * (k + k.adjoint()));
  std::array<double, 4> s{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (e.values[i] < -1e-9)
      throw Error(Errc::InvalidState,
                  "flip spectrum has a significantly negative eigenvalue");
    s[i] = std::sqrt(std::max(e.values[i], 0.0));
  }
  return s;
}

inline double concurrence_mixed(const Mat4& rho) {
  const std::array<double, 4> s = flip_spectrum(rho);
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

}  // namespace pseudoq
