#include <catch2/catch_amalgamated.hpp>

#include <pseudoq/factorization.hpp>
#include <pseudoq/random.hpp>
#include <pseudoq/representation.hpp>

#include "support/oracles.hpp"

using namespace pseudoq;

namespace {

PseudoBasis pushed_basis(const Mat2& a, const Mat2& b) {
  PseudoBasis out = magic_basis();
  const Mat4 k = kron(a, b);
  for (auto& v : out.vectors) v = k * v;
  return out;
}

Mat2 diag2(Complex a, Complex b) {
  Mat2 m;
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Hand expansion of D(diag(p, 1/p) (x) I) in the magic basis; valid for
// any nonzero complex p, covering both the rotation and boost examples.
Mat4 expected_first_qubit_diag(Complex p) {
  const Complex c = (p + 1.0 / p) / 2.0;
  const Complex s = (p - 1.0 / p) / (2.0 * Complex(0, 1));
  Mat4 d;
  d(0, 0) = c;
  d(0, 1) = -s;
  d(1, 0) = s;
  d(1, 1) = c;
  d(2, 2) = c;
  d(2, 3) = s;
  d(3, 2) = -s;
  d(3, 3) = c;
  return d;
}

}  // namespace

TEST_CASE("rep_matrix", "[representation]") {
  SECTION("identity is identically represented") {
    REQUIRE(max_abs(rep_matrix(Mat4::identity(), magic_basis()) -
                    Mat4::identity()) < 1e-12);
    Rng rng(41);
    const auto [a, b] = random_sl2_pair(rng);
    REQUIRE(max_abs(rep_matrix(Mat4::identity(), pushed_basis(a, b)) -
                    Mat4::identity()) < 1e-9);
  }
  SECTION("first-qubit phase rotation gives the two planar rotations") {
    const double th = 0.3;
    const Mat4 r = kron(diag2(std::polar(1.0, th), std::polar(1.0, -th)),
                        Mat2::identity());
    const Mat4 want = expected_first_qubit_diag(std::polar(1.0, th));
    REQUIRE(max_abs(rep_matrix(r, magic_basis()) - want) < 1e-12);
  }
  SECTION("first-qubit boost gives cosh/sinh blocks") {
    const double k = 0.4;
    const Mat4 r = kron(diag2(std::exp(k), std::exp(-k)), Mat2::identity());
    const Mat4 d = rep_matrix(r, magic_basis());
    const Mat4 want = expected_first_qubit_diag(std::exp(k));
    REQUIRE(max_abs(d - want) < 1e-12);
    REQUIRE(d(0, 0).real() == Catch::Approx(std::cosh(k)).margin(1e-12));
    REQUIRE(d(0, 1).imag() == Catch::Approx(std::sinh(k)).margin(1e-12));
    REQUIRE(max_abs(d * d.transpose() - Mat4::identity()) < 1e-12);
  }
  SECTION("reconstruction identity in random bases") {
    Rng rng(42);
    for (int r = 0; r < 100; ++r) {
      const auto [a, b] = random_sl2_pair(rng);
      const PseudoBasis basis = pushed_basis(a, b);
      const Mat4 op = random_matrix<4>(rng);
      const Mat4 d = rep_matrix(op, basis);
      Mat4 rec;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          rec += d(i, j) * outer(basis.vectors[i],
                                 spin_flip_state(basis.vectors[j]));
      REQUIRE(max_abs(rec - op) < 1e-9 * std::max(1.0, max_abs(op)));
    }
  }
  SECTION("completeness relation of valid bases") {
    Rng rng(43);
    const auto [a, b] = random_sl2_pair(rng);
    for (const PseudoBasis& basis : {magic_basis(), pushed_basis(a, b)}) {
      Mat4 sum;
      for (const auto& x : basis.vectors)
        sum += outer(x, spin_flip_state(x));
      REQUIRE(max_abs(sum - Mat4::identity()) < 1e-10);
    }
  }
  SECTION("rejects an invalid basis") {
    PseudoBasis bad = magic_basis();
    bad.vectors[0] = Complex(2.0) * bad.vectors[0];
    try {
      rep_matrix(Mat4::identity(), bad);
      FAIL("expected InvalidBasis");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::InvalidBasis);
    }
  }
}

TEST_CASE("preserves_pseudo_product", "[representation]") {
  Rng rng(44);
  SECTION("det-1 Kronecker pairs preserve it") {
    for (int r = 0; r < 100; ++r) {
      const auto [a, b] = random_sl2_pair(rng);
      REQUIRE(preserves_pseudo_product(kron(a, b), 1e-9));
    }
  }
  SECTION("scaling breaks it") {
    REQUIRE_FALSE(preserves_pseudo_product(Complex(2.0) * Mat4::identity(),
                                           1e-9));
  }
  SECTION("SWAP preserves it yet represents with determinant -1") {
    const Mat4 s = oracles::swap_gate();
    REQUIRE(preserves_pseudo_product(s, 1e-12));
    const Mat4 d = rep_matrix(s, magic_basis());
    REQUIRE(max_abs(d * d.transpose() - Mat4::identity()) < 1e-12);
    REQUIRE(std::abs(determinant(d) + 1.0) < 1e-12);
  }
}

TEST_CASE("basis_change", "[representation]") {
  SECTION("same basis gives the identity") {
    const PseudoBasis m = magic_basis();
    REQUIRE(max_abs(basis_change(m, m) - Mat4::identity()) < 1e-12);
  }
  SECTION("row swap gives the permutation") {
    const PseudoBasis m = magic_basis();
    PseudoBasis swapped = m;
    std::swap(swapped.vectors[0], swapped.vectors[1]);
    const Mat4 s = basis_change(swapped, m);
    Mat4 want;
    want(0, 1) = 1.0;
    want(1, 0) = 1.0;
    want(2, 2) = 1.0;
    want(3, 3) = 1.0;
    REQUIRE(max_abs(s - want) < 1e-12);
  }
  SECTION("change between valid bases is complex orthogonal") {
    Rng rng(45);
    for (int r = 0; r < 100; ++r) {
      const auto [a, b] = random_sl2_pair(rng);
      const Mat4 s = basis_change(pushed_basis(a, b), magic_basis());
      REQUIRE(max_abs(s.transpose() * s - Mat4::identity()) < 1e-9);
      // The defining relation: from_i = sum_j S_ij to_j.
      const PseudoBasis from = pushed_basis(a, b);
      const PseudoBasis to = magic_basis();
      for (std::size_t i = 0; i < 4; ++i) {
        StateVector rec;
        for (std::size_t j = 0; j < 4; ++j) rec += s(i, j) * to.vectors[j];
        REQUIRE(max_abs(rec - from.vectors[i]) < 1e-9);
      }
    }
  }
}

TEST_CASE("sl2_pair_to_so4", "[representation]") {
  SECTION("kernel maps to the identity") {
    REQUIRE(max_abs(sl2_pair_to_so4(Mat2::identity(), Mat2::identity()) -
                    Mat4::identity()) < 1e-12);
    REQUIRE(max_abs(sl2_pair_to_so4(Complex(-1.0) * Mat2::identity(),
                                    Complex(-1.0) * Mat2::identity()) -
                    Mat4::identity()) < 1e-12);
  }
  SECTION("unitary pairs give real orthogonal matrices") {
    Rng rng(46);
    for (int r = 0; r < 100; ++r) {
      const Mat4 d = sl2_pair_to_so4(random_su2(rng), random_su2(rng));
      double im = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          im = std::max(im, std::abs(d(i, j).imag()));
      REQUIRE(im < 1e-10);
      REQUIRE(max_abs(d * d.transpose() - Mat4::identity()) < 1e-9);
    }
  }
  SECTION("orthogonality, multiplicativity, kernel invariance") {
    Rng rng(47);
    for (int r = 0; r < 200; ++r) {
      const auto [a1, b1] = random_sl2_pair(rng);
      const auto [a2, b2] = random_sl2_pair(rng);
      const Mat4 d1 = sl2_pair_to_so4(a1, b1);
      const Mat4 d2 = sl2_pair_to_so4(a2, b2);
      REQUIRE(max_abs(d1 * d1.transpose() - Mat4::identity()) < 1e-9);
      REQUIRE(max_abs(d1.transpose() * d1 - Mat4::identity()) < 1e-9);
      REQUIRE(max_abs(sl2_pair_to_so4(a1 * a2, b1 * b2) - d1 * d2) < 1e-9);
      REQUIRE(max_abs(sl2_pair_to_so4(Complex(-1.0) * a1,
                                      Complex(-1.0) * b1) -
                      d1) < 1e-12);
    }
  }
  SECTION("representation stays orthogonal in any valid basis") {
    Rng rng(48);
    for (int r = 0; r < 100; ++r) {
      const auto [a, b] = random_sl2_pair(rng);
      const auto [a0, b0] = random_sl2_pair(rng);
      const Mat4 d = rep_matrix(kron(a, b), pushed_basis(a0, b0));
      REQUIRE(max_abs(d * d.transpose() - Mat4::identity()) < 1e-9);
    }
  }
  SECTION("rejects non-unimodular operators") {
    try {
      sl2_pair_to_so4(diag2(2.0, 1.0), Mat2::identity());
      FAIL("expected NotUnimodular");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::NotUnimodular);
    }
  }
}
