#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "pseudoq/decomp.hpp"
#include "pseudoq/factorization.hpp"
#include "pseudoq/matrix.hpp"
#include "pseudoq/pseudometric.hpp"
#include "pseudoq/representation.hpp"

namespace pseudoq {

struct HRep {
  Mat4 h;
  PseudoBasis basis;
};

// h_ij = <x_i-tilde| rho |x_j-tilde>; rho = sum_ij h_ij |x_i><x_j|.
inline HRep h_representation(const Mat4& rho, const PseudoBasis& basis) {
  validate_density(rho, "h_representation state");
  require_pseudo_basis(basis, "h_representation basis");
  std::array<StateVector, 4> duals;
  for (std::size_t i = 0; i < 4; ++i)
    duals[i] = spin_flip_state(basis.vectors[i]);
  HRep out{Mat4(), basis};
  for (std::size_t j = 0; j < 4; ++j) {
    const StateVector rd = rho * duals[j];
    for (std::size_t i = 0; i < 4; ++i) out.h(i, j) = dot(duals[i], rd);
  }
  return out;
}

struct PseudoSpectrum {
  std::array<double, 4> lambdas;        // descending, >= 0
  std::array<StateVector, 4> vectors;   // first `rank` are pseudo-normalized
  std::size_t rank = 0;                 // count of lambdas > 1e-10
};

// rho = sum_k lambda_k |x_k><x_k| with C(x_i,x_j) = delta_ij: spectral
// decomposition, then Takagi of the pseudo Gram matrix of the weighted
// eigenvectors. The diagonalizing combination takes the Takagi columns
// directly, x_k = sum_i W_ik w_i, which is what makes the new Gram equal
// W† (W d Wᵀ) conj(W) = diag(d).
inline PseudoSpectrum pseudo_diagonalize(const Mat4& rho) {
  validate_density(rho, "pseudo_diagonalize state");

  const EigResult<4> e = hermitian_eig(rho);
  std::array<StateVector, 4> w;
  for (std::size_t i = 0; i < 4; ++i)
    w[i] = Complex(std::sqrt(std::max(e.values[i], 0.0))) * e.vectors.col(i);

  Mat4 tau;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) tau(i, j) = pseudo_inner(w[i], w[j]);
  tau = 0.5 * (tau + tau.transpose());

  const TakagiResult tk = takagi(tau);
  PseudoSpectrum out;
  out.lambdas = tk.d;
  for (std::size_t k = 0; k < 4; ++k) {
    if (tk.d[k] <= 1e-10) break;
    StateVector cand;
    for (std::size_t i = 0; i < 4; ++i) cand += tk.w(i, k) * w[i];
    try {
      out.vectors[k] = pseudo_normalize(cand);
    } catch (const Error& err) {
      if (err.code() == Errc::ZeroPseudoNorm)
        throw Error(Errc::Degenerate,
                    "pseudo-null direction at nonzero weight; the state has "
                    "no pseudo-diagonal form",
                    static_cast<int>(k) + 1);
      throw;
    }
    ++out.rank;
  }

  Mat4 rec;
  for (std::size_t k = 0; k < out.rank; ++k)
    rec += Complex(out.lambdas[k]) * outer(out.vectors[k], out.vectors[k]);
  if (max_abs(rec - rho) > tol::hard)
    throw Error(Errc::Degenerate,
                "state does not admit a pseudo-diagonal form (reconstruction "
                "residual above 1e-8)");
  return out;
}

// Fill a rank-deficient pseudo-diagonal vector set up to a full basis.
// Candidates with pseudo-null residuals are skipped rather than fatal,
// unlike pseudo_gram_schmidt; the completion is non-unique by construction.
inline PseudoBasis complete_pseudo_basis(const std::array<StateVector, 4>& vecs,
                                         std::size_t rank) {
  PseudoBasis b;
  std::size_t n = rank;
  for (std::size_t k = 0; k < rank; ++k) b.vectors[k] = vecs[k];

  constexpr double s = M_SQRT1_2;
  std::array<StateVector, 4> cand{};
  cand[0][0] = s;
  cand[0][3] = s;
  cand[1][0] = s;
  cand[1][3] = -s;
  cand[2][1] = s;
  cand[2][2] = s;
  cand[3][1] = s;
  cand[3][2] = -s;

  for (std::size_t c = 0; c < 4 && n < 4; ++c) {
    StateVector r = cand[c];
    for (std::size_t i = 0; i < n; ++i) {
      const Complex coef = dot(spin_flip_state(b.vectors[i]), r);
      r -= coef * b.vectors[i];
    }
    if (std::abs(pseudo_inner(r, r)) <= 1e-10) continue;
    b.vectors[n++] = pseudo_normalize(r);
  }
  if (n < 4)
    throw Error(Errc::Degenerate, "pseudo basis completion stalled");
  return b;
}

struct TransformDecision {
  bool yes = false;
  std::string reason;                    // set when yes == false
  Mat4 witness;                          // complex orthogonal Q, on yes
  std::array<double, 4> lambdas_rho{};   // descending pseudo spectra
  std::array<double, 4> lambdas_sigma{};
  PseudoBasis basis_rho;                 // completed bases, on yes
  PseudoBasis basis_sigma;
};

// sigma is reachable from rho by a single successful local filter iff the
// pseudo spectra are proportional (equal once each is normalized to unit
// sum) with matching rank.
inline TransformDecision transformable(const Mat4& rho, const Mat4& sigma,
                                       double tolerance = 1e-6) {
  const PseudoSpectrum sr = pseudo_diagonalize(rho);
  const PseudoSpectrum ss = pseudo_diagonalize(sigma);

  TransformDecision dec;
  dec.lambdas_rho = sr.lambdas;
  dec.lambdas_sigma = ss.lambdas;

  if (sr.rank != ss.rank) {
    dec.reason = "pseudo spectrum ranks differ (" + std::to_string(sr.rank) +
                 " vs " + std::to_string(ss.rank) + ")";
    return dec;
  }

  double sum_r = 0.0, sum_s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (sr.lambdas[i] > 1e-10) sum_r += sr.lambdas[i];
    if (ss.lambdas[i] > 1e-10) sum_s += ss.lambdas[i];
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    dev = std::max(dev,
                   std::abs(sr.lambdas[i] / sum_r - ss.lambdas[i] / sum_s));
  if (dev >= tolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", dev);
    dec.reason =
        std::string("pseudo spectra are not proportional (max deviation ") +
        buf + ")";
    return dec;
  }

  dec.basis_rho = complete_pseudo_basis(sr.vectors, sr.rank);
  dec.basis_sigma = complete_pseudo_basis(ss.vectors, ss.rank);

  // The two bases can differ by an improper orthogonal transformation;
  // negating one basis vector (a sign that outer products cannot see)
  // moves the basis change into SO(4,C), where a local preimage exists.
  Mat4 t = basis_change(dec.basis_sigma, dec.basis_rho);
  if (determinant(t).real() < 0.0) {
    dec.basis_sigma.vectors[3] = -dec.basis_sigma.vectors[3];
    for (std::size_t j = 0; j < 4; ++j) t(3, j) = -t(3, j);
  }

  dec.yes = true;
  dec.witness = t.transpose();
  return dec;
}

struct FilterResult {
  Mat4 sigma;
  double probability = 0.0;
};

// Single-branch local filter: sigma = (A(x)B) rho (A(x)B)† / p with
// p = tr(rho A†A (x) B†B).
inline FilterResult apply_local_filter(const Mat4& rho, const Mat2& a,
                                       const Mat2& b) {
  validate_density(rho, "apply_local_filter state");
  require_finite(a, "apply_local_filter A");
  require_finite(b, "apply_local_filter B");
  const Mat4 k = kron(a, b);
  const Mat4 m = k * rho * k.adjoint();
  const Complex tr = m.trace();
  if (tr.real() <= 1e-12)
    throw Error(Errc::ZeroProbability,
                "filter branch has vanishing success probability");
  Mat4 sigma = Complex(1.0 / tr.real()) * m;
  sigma = 0.5 * (sigma + sigma.adjoint());
  return {sigma, tr.real()};
}

struct TransformPlan {
  Mat2 a;
  Mat2 b;
  double success_probability = 0.0;  // in (0, 1]
};

// Build the local action constructively: pair the pseudo-diagonal bases by
// descending lambda, M = sum_i |x_i^sigma><x_i^rho-tilde|,
// factor M = scale * A (x) B, and normalize each factor to largest singular
// value 1 so that A†A <= I, B†B <= I are valid measurement operators.
inline TransformPlan synthesize_action(const Mat4& rho, const Mat4& sigma) {
  const TransformDecision dec = transformable(rho, sigma);
  if (!dec.yes) throw Error(Errc::NotTransformable, dec.reason);

  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    m += outer(dec.basis_sigma.vectors[i],
               spin_flip_state(dec.basis_rho.vectors[i]));

  LocalPair lp;
  try {
    lp = kronecker_factor(m, tol::hard);
  } catch (const Error& err) {
    if (err.code() == Errc::NotProductForm)
      throw Error(Errc::NotProductForm,
                  std::string("basis pairing violated the product-form "
                              "guarantee: ") +
                      err.what());
    throw;
  }

  TransformPlan plan;
  plan.a = Complex(1.0 / svd(lp.a).s[0]) * lp.a;
  plan.b = Complex(1.0 / svd(lp.b).s[0]) * lp.b;

  const FilterResult fr = apply_local_filter(rho, plan.a, plan.b);
  if (max_abs(fr.sigma - sigma) > tol::hard)
    throw Error(Errc::InternalCheck,
                "synthesized plan does not reproduce the target state");
  plan.success_probability = std::min(fr.probability, 1.0);
  return plan;
}

}  // namespace pseudoq
