#pragma once

#include <cmath>
#include <cstdio>
#include <utility>

#include "pseudoq/decomp.hpp"
#include "pseudoq/matrix.hpp"
#include "pseudoq/pseudometric.hpp"
#include "pseudoq/representation.hpp"

namespace pseudoq {

// Operator expressed as scale * (A (x) B) with det A = det B = 1.
// (A, B, scale) and (-A, -B, scale) describe the same operator; factoring
// routines return the canonical sign (first nonzero entry of A, row-major,
// has argument in (-pi/2, pi/2]).
struct LocalPair {
  Mat2 a;
  Mat2 b;
  Complex scale;
};

// Rows indexed by the A-entry position (i,j), columns by the B-entry
// position (k,l): realign(M)[2i+j][2k+l] = M[2i+k][2j+l]. A Kronecker
// product A (x) B realigns to the rank-1 matrix vec(A)·vec(B)ᵀ.
inline Mat4 realign(const Mat4& m) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          r(2 * i + j, 2 * k + l) = m(2 * i + k, 2 * j + l);
  return r;
}

namespace detail {

// For an orthogonal preimage the scale is forced to +/-1; fold a negative
// sign into B so the pair reproduces D rather than -D.
inline void absorb_unit_scale(LocalPair& p) {
  if (p.scale.real() < 0.0) {
    p.b = -p.b;
    p.scale = -p.scale;
  }
}

inline void canonicalize_sign(LocalPair& p) {
  const double cut = 1e-12 * max_abs(p.a);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex e = p.a(i, j);
      if (std::abs(e) <= cut) continue;
      const double ph = std::arg(e);
      if (!(ph > -M_PI_2 && ph <= M_PI_2)) {
        p.a = -p.a;
        p.b = -p.b;
      }
      return;
    }
}

}  // namespace detail

// Decide whether M = scale * (A (x) B) and recover the factors: realign,
// SVD, accept iff the operator Schmidt spectrum is rank 1 up to tol.
inline LocalPair kronecker_factor(const Mat4& m, double tolerance = tol::hard) {
  require_finite(m, "kronecker_factor input");
  if (max_abs(m) == 0.0)
    throw Error(Errc::Singular, "kronecker_factor of the zero operator");
  const SvdResult<4> f = svd(realign(m));
  if (f.s[1] >= tolerance * f.s[0]) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "s2/s1 = %.3e", f.s[1] / f.s[0]);
    throw Error(Errc::NotProductForm,
                std::string("operator Schmidt rank exceeds 1 (") + buf + ")");
  }

  const double root = std::sqrt(f.s[0]);
  Mat2 a0, b0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      a0(i, j) = root * f.u(2 * i + j, 0);
      b0(i, j) = root * std::conj(f.v(2 * i + j, 0));
    }
  const Complex da = determinant(a0), db = determinant(b0);
  if (std::abs(da) < 1e-12 || std::abs(db) < 1e-12)
    throw Error(Errc::Singular, "recovered Kronecker factor is singular");
  const Complex ra = std::sqrt(da), rb = std::sqrt(db);
  LocalPair p{Complex(1.0) / ra * a0, Complex(1.0) / rb * b0, ra * rb};
  detail::canonicalize_sign(p);
  return p;
}

// H = sum_i |x_i-tilde><x_i-tilde| for a pseudo-orthonormal basis is
// Hermitian PSD and always of product form.
inline LocalPair lemma1_decompose(const PseudoBasis& basis) {
  require_pseudo_basis(basis, "lemma1_decompose basis");
  Mat4 h;
  for (std::size_t i = 0; i < 4; ++i) {
    const StateVector d = spin_flip_state(basis.vectors[i]);
    h += outer(d, d);
  }
  const EigResult<4> e = hermitian_eig(h);
  if (e.values[3] < -tol::hard)
    throw Error(Errc::InternalCheck, "dual-sum operator is not PSD");
  try {
    return kronecker_factor(h, tol::hard);
  } catch (const Error& err) {
    if (err.code() == Errc::NotProductForm)
      throw Error(Errc::NotProductForm,
                  std::string("dual-sum operator failed to factor, "
                              "contradicting the product-form guarantee: ") +
                      err.what());
    throw;
  }
}

// R = sum_ij D_ij |x_i><x_j-tilde|, the operator whose representation in
// the basis is D.
inline Mat4 assemble_from_rep(const Mat4& d, const PseudoBasis& basis) {
  Mat4 r;
  for (std::size_t j = 0; j < 4; ++j) {
    const StateVector dual = spin_flip_state(basis.vectors[j]);
    for (std::size_t i = 0; i < 4; ++i)
      r += d(i, j) * outer(basis.vectors[i], dual);
  }
  return r;
}

inline void require_complex_orthogonal(const Mat4& d, const char* what) {
  require_finite(d, what);
  const Mat4 id = Mat4::identity();
  if (max_abs(d * d.transpose() - id) >= tol::post ||
      max_abs(d.transpose() * d - id) >= tol::post)
    throw Error(Errc::NotOrthogonal,
                std::string(what) + ": D Dᵀ = DᵀD = I fails at 1e-9");
}

inline LocalPair so4_to_sl2_pair_direct(const Mat4& d, const PseudoBasis& basis) {
  require_complex_orthogonal(d, "so4_to_sl2_pair_direct input");
  require_pseudo_basis(basis, "so4_to_sl2_pair_direct basis");
  LocalPair p = kronecker_factor(assemble_from_rep(d, basis), tol::hard);
  detail::absorb_unit_scale(p);
  return p;
}

// Constructive inverse following the polar-decomposition proof:
//   1. assemble R from D
//   2. R = P U with P = sqrt(R R†)
//   3. y_m = sum_i conj(S)_im R x_i, where S maps the dual basis to the
//      magic basis; then P² = sum_m |y_m><y_m|
//   4. P² is the dual-sum operator of the flipped y set, so it factors;
//      phase-rotate the factors Hermitian positive and take their roots
//   5. U equals its own operator flip, hence factors locally
//   6. compose the P and U factors
inline LocalPair so4_to_sl2_pair_polar(const Mat4& d, const PseudoBasis& basis) {
  require_complex_orthogonal(d, "so4_to_sl2_pair_polar input");
  require_pseudo_basis(basis, "so4_to_sl2_pair_polar basis");
  const Mat4 r = assemble_from_rep(d, basis);

  const PolarResult pol = polar_decompose(r);

  PseudoBasis duals;
  for (std::size_t i = 0; i < 4; ++i)
    duals.vectors[i] = spin_flip_state(basis.vectors[i]);
  const Mat4 s = basis_change(duals, magic_basis());

  std::array<StateVector, 4> x1;
  for (std::size_t i = 0; i < 4; ++i) x1[i] = r * basis.vectors[i];
  std::array<StateVector, 4> y;
  for (std::size_t m = 0; m < 4; ++m) {
    StateVector acc;
    for (std::size_t i = 0; i < 4; ++i) acc += std::conj(s(i, m)) * x1[i];
    y[m] = acc;
  }

  Mat4 sum_yy;
  for (std::size_t m = 0; m < 4; ++m) sum_yy += outer(y[m], y[m]);
  const Mat4 p2 = pol.p * pol.p;
  if (max_abs(p2 - sum_yy) > tol::hard * std::max(1.0, max_abs(p2)))
    throw Error(Errc::InternalCheck, "P² does not match the y-sum", 3);

  PseudoBasis flipped_y;
  for (std::size_t m = 0; m < 4; ++m)
    flipped_y.vectors[m] = spin_flip_state(y[m]);
  const LocalPair hf = lemma1_decompose(flipped_y);

  // e^{2ia} F† = ... : read the Hermitian-restoring phase off the largest
  // entry, then fix the overall sign by the trace.
  const auto hermitian_phase = [](const Mat2& f) -> std::pair<Mat2, Complex> {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        if (std::abs(f(i, j)) > best) {
          best = std::abs(f(i, j));
          bi = i;
          bj = j;
        }
    const Complex ratio = std::conj(f(bj, bi)) / f(bi, bj);
    const double ar = std::abs(ratio);
    if (ar < 0.5 || ar > 2.0)
      throw Error(Errc::InternalCheck,
                  "factor is not Hermitian up to phase", 4);
    Complex ph = std::sqrt(ratio / ar);
    Mat2 g = ph * f;
    g = 0.5 * (g + g.adjoint());
    if (g.trace().real() < 0.0) {
      g = -g;
      ph = -ph;
    }
    return {g, ph};
  };

  const auto [ga, fa] = hermitian_phase(hf.a);
  const auto [gb, fb] = hermitian_phase(hf.b);
  const Complex seff = hf.scale / (fa * fb);
  if (seff.real() <= 0.0 || std::abs(seff.imag()) > tol::hard * std::abs(seff))
    throw Error(Errc::InternalCheck, "P² scale is not positive real", 4);
  const Mat2 pa = psd_sqrt(ga), pb = psd_sqrt(gb);
  const double sroot = std::sqrt(seff.real());
  if (max_abs(pol.p - Complex(sroot) * kron(pa, pb)) >
      tol::hard * std::max(1.0, max_abs(pol.p)))
    throw Error(Errc::InternalCheck, "P does not match its factor product", 4);

  if (max_abs(spin_flip_op4(pol.u) - pol.u) > tol::hard)
    throw Error(Errc::InternalCheck, "U is not its own operator flip", 5);
  const LocalPair uf = kronecker_factor(pol.u, tol::hard);

  const Mat2 a0 = pa * uf.a, b0 = pb * uf.b;
  const Complex da = determinant(a0), db = determinant(b0);
  const Complex ra = std::sqrt(da), rb = std::sqrt(db);
  LocalPair out{Complex(1.0) / ra * a0, Complex(1.0) / rb * b0,
                Complex(sroot) * uf.scale * ra * rb};
  detail::absorb_unit_scale(out);
  detail::canonicalize_sign(out);
  return out;
}

}  // namespace pseudoq
