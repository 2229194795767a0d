#pragma once

#include <cmath>

#include "pseudoq/matrix.hpp"
#include "pseudoq/pseudometric.hpp"

namespace pseudoq {

// D_ij = <x_i-tilde| R |x_j>, the matrix of R in the biorthogonal pair
// ({x_i}, {x_i-tilde}).
inline Mat4 rep_matrix(const Mat4& r, const PseudoBasis& basis) {
  require_finite(r, "rep_matrix input");
  require_pseudo_basis(basis, "rep_matrix basis");
  Mat4 d;
  for (std::size_t j = 0; j < 4; ++j) {
    const StateVector rx = r * basis.vectors[j];
    for (std::size_t i = 0; i < 4; ++i)
      d(i, j) = dot(spin_flip_state(basis.vectors[i]), rx);
  }
  return d;
}

inline bool preserves_pseudo_product(const Mat4& r, double tolerance) {
  require_finite(r, "preserves_pseudo_product input");
  const Mat4 rt = spin_flip_op4(r);
  const Mat4 id = Mat4::identity();
  return max_abs(r.adjoint() * rt - id) < tolerance &&
         max_abs(rt * r.adjoint() - id) < tolerance;
}

// S with from_i = sum_j S_ij to_j; complex orthogonal for valid bases.
inline Mat4 basis_change(const PseudoBasis& from, const PseudoBasis& to) {
  require_pseudo_basis(from, "basis_change source");
  require_pseudo_basis(to, "basis_change target");
  Mat4 s;
  for (std::size_t j = 0; j < 4; ++j) {
    const StateVector dual = spin_flip_state(to.vectors[j]);
    for (std::size_t i = 0; i < 4; ++i) s(i, j) = dot(dual, from.vectors[i]);
  }
  return s;
}

// The two-to-one SL(2,C) x SL(2,C) -> SO(4,C) map, anchored in the magic
// basis. (A,B) and (-A,-B) have the same image.
inline Mat4 sl2_pair_to_so4(const Mat2& a, const Mat2& b) {
  if (std::abs(determinant(a) - Complex(1.0)) >= 1e-9 ||
      std::abs(determinant(b) - Complex(1.0)) >= 1e-9)
    throw Error(Errc::NotUnimodular, "sl2_pair_to_so4 needs det A = det B = 1");
  return rep_matrix(kron(a, b), magic_basis());
}

}  // namespace pseudoq
