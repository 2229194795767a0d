#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "pseudoq/decomp.hpp"
#include "pseudoq/matrix.hpp"

namespace pseudoq {

// Deterministic random source for tests and the self-test suites. The
// mapping from raw engine output to doubles is spelled out here instead of
// going through <random> distributions, whose results differ across
// standard library implementations for the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex cnormal() { return Complex(normal(), normal()) * M_SQRT1_2; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

template <std::size_t N>
inline Vector<N> random_vector(Rng& rng) {
  Vector<N> v;
  for (std::size_t i = 0; i < N; ++i) v[i] = rng.cnormal();
  return v;
}

inline StateVector random_state(Rng& rng) {
  StateVector v = random_vector<4>(rng);
  v *= Complex(1.0 / norm2(v));
  return v;
}

template <std::size_t N>
inline Matrix<N> random_matrix(Rng& rng) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = rng.cnormal();
  return m;
}

inline Mat2 random_su2(Rng& rng) {
  Complex a = rng.cnormal(), b = rng.cnormal();
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  a /= n;
  b /= n;
  Mat2 m;
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = -std::conj(b);
  m(1, 1) = std::conj(a);
  return m;
}

// Random element of SL(2,C), conditioned away from near-singular draws.
inline Mat2 random_sl2(Rng& rng) {
  for (;;) {
    Mat2 m = random_matrix<2>(rng);
    const Complex d = determinant(m);
    if (std::abs(d) < 1e-3) continue;
    m *= Complex(1.0) / std::sqrt(d);
    return m;
  }
}

inline std::pair<Mat2, Mat2> random_sl2_pair(Rng& rng) {
  Mat2 a = random_sl2(rng);
  Mat2 b = random_sl2(rng);
  return {a, b};
}

// U diag(e^k, e^-k) V with U, V in SU(2): det-1 with a controlled
// singular-value spread.
inline Mat2 random_sl2_spread(Rng& rng, double kmax) {
  const Mat2 u = random_su2(rng);
  const Mat2 v = random_su2(rng);
  const double k = rng.uniform(-kmax, kmax);
  Mat2 d;
  d(0, 0) = std::exp(k);
  d(1, 1) = std::exp(-k);
  return u * d * v;
}

// Full-rank density matrix: normalized G·G†.
inline Mat4 random_density(Rng& rng) {
  const Mat4 g = random_matrix<4>(rng);
  Mat4 rho = g * g.adjoint();
  rho *= Complex(1.0) / rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace pseudoq
