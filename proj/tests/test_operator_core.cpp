#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "krein/operator_core.hpp"
#include "krein/random_models.hpp"

using namespace krein;

namespace {

Mat dense_solve_inverse(const Mat& m) {
  return m.fullPivLu().solve(Mat::Identity(m.rows(), m.cols()));
}

OperatorModel diag_model(std::initializer_list<double> entries) {
  RVec d(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) d(i++) = e;
  return OperatorModel(d.cast<cplx>().asDiagonal().toDenseMatrix());
}

}  // namespace

TEST_CASE("operator model hermitizes and reconstructs") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat x = random_gaussian(rng, 12, 12);
    const OperatorModel m(x);
    CHECK(hermitian_defect(m.matrix()) == 0.0);
    CHECK(m.reconstruction_error() <= 1e-12);
    CHECK(m.lambda_inf() == m.eigvals().minCoeff());
    for (Eigen::Index k = 1; k < m.dim(); ++k) CHECK(m.eigvals()(k) >= m.eigvals()(k - 1));
  }
}

TEST_CASE("diagonal model is exact") {
  RVec d(4);
  d << 3.0, -1.0, 2.0, 0.5;
  const OperatorModel m = OperatorModel::diagonal(d);
  CHECK(m.lambda_inf() == -1.0);
  CHECK(m.reconstruction_error() == 0.0);
  const Mat r = resolvent(m, kI);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(r(i, i) == 1.0 / (kI - d(i)));
}

TEST_CASE("resolvent examples") {
  SUBCASE("diagonal inversion") {
    const Mat r = resolvent(diag_model({1.0, 2.0}), 0.0);
    CHECK(std::abs(r(0, 0) - cplx(-1.0)) <= 1e-15);
    CHECK(std::abs(r(1, 1) - cplx(-0.5)) <= 1e-15);
    CHECK(std::abs(r(0, 1)) == 0.0);
  }
  SUBCASE("one by one at i") {
    const Mat r = resolvent(diag_model({0.0}), kI);
    CHECK(std::abs(r(0, 0) + kI) <= 1e-15);
  }
  SUBCASE("random 8x8 against a dense solve") {
    Rng rng(7);
    const OperatorModel m(random_hermitian(rng, 8));
    const cplx z = 3.0 * kI;
    const Mat oracle = dense_solve_inverse(z * Mat::Identity(8, 8) - m.matrix());
    CHECK(max_abs_diff(resolvent(m, z), oracle) <= 1e-12);
    const Mat r = resolvent(m, z);
    CHECK(rel_diff((z * Mat::Identity(8, 8) - m.matrix()) * r, Mat::Identity(8, 8)) <= 1e-12);
  }
  SUBCASE("spectrum hit") {
    CHECK_THROWS_AS(resolvent(diag_model({1.0, 2.0}), 2.0), SpectrumHit);
    CHECK_THROWS_AS(resolvent(diag_model({1.0, 2.0}), cplx(1.0, 1e-12)), SpectrumHit);
  }
}

TEST_CASE("resolvent adjoint symmetry") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const OperatorModel m(random_hermitian(rng, 10));
    const cplx z(0.3 * trial - 2.0, 0.5 + 0.1 * trial);
    CHECK(max_abs_diff(resolvent(m, z).adjoint(), resolvent(m, std::conj(z))) <= 1e-12);
  }
}

TEST_CASE("first resolvent identity on random models") {
  Rng rng(12);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const OperatorModel m(random_hermitian(rng, 4 + trial % 9));
    const cplx z(ud(rng), 0.2 + std::abs(ud(rng)));
    const cplx w(ud(rng), -0.2 - std::abs(ud(rng)));
    const ResolventMap rmap = [&](cplx x) { return resolvent(m, x); };
    const double bound = 1e-11 * spectral_norm(rmap(z)) * spectral_norm(rmap(w));
    CHECK(pseudo_resolvent_defect(rmap, z, w) <= bound);
  }
}

TEST_CASE("pseudo resolvent defect") {
  Rng rng(13);
  const OperatorModel m(random_hermitian(rng, 6));
  const ResolventMap rmap = [&](cplx x) { return resolvent(m, x); };
  CHECK(pseudo_resolvent_defect(rmap, kI, 2.0 * kI) <= 1e-11);
  CHECK(pseudo_resolvent_defect(rmap, kI, kI) == 0.0);
}

TEST_CASE("scale weight examples") {
  Rng rng(2);
  const OperatorModel any(random_hermitian(rng, 5));
  CHECK(scale_weight(any, 0.0).w == Mat::Identity(5, 5));

  const ScaleWeight w1 = scale_weight(diag_model({1.0}), 1.0);
  CHECK(std::abs(w1.w(0, 0) - std::sqrt(2.0)) <= 1e-15);

  const ScaleWeight wh = scale_weight(diag_model({0.0, 2.0}), 0.5);
  CHECK(std::abs(wh.w(0, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(wh.w(1, 1) - std::pow(5.0, 0.25)) <= 1e-15);

  CHECK_THROWS_AS(scale_weight(any, 1.5), DomainError);
  CHECK_THROWS_AS(scale_weight(any, -1.01), DomainError);
}

TEST_CASE("scale weight group law and inverse") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const OperatorModel m(random_hermitian(rng, 9));
    const double s = -0.9 + 0.09 * trial;
    const double t = 0.5 * (1.0 - std::abs(s)) * (trial % 2 ? 1.0 : -1.0);
    const Mat ws = scale_weight(m, s).w;
    CHECK(rel_diff(ws * scale_weight(m, t).w, scale_weight(m, s + t).w) <= 1e-12);
    CHECK(max_abs_diff(ws * scale_weight(m, -s).w, Mat::Identity(9, 9)) <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(ws);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("op_norm_scale examples") {
  Rng rng(4);
  const OperatorModel m(random_hermitian(rng, 6));
  CHECK(op_norm_scale(Mat::Identity(6, 6), m, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  const OperatorModel zero = diag_model({0.0});
  Mat two(1, 1);
  two(0, 0) = 2.0;
  CHECK(op_norm_scale(two, zero, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(op_norm_scale(two, zero, 1.5, 0.0), DomainError);
}

TEST_CASE("interpolation bound on the admissible range") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorModel m(random_hermitian(rng, 3 + trial % 10) * (1.0 + trial % 4));
    const double li = m.lambda_inf();
    for (double delta : {1.0, 2.0, 10.0}) {
      const double lambda = li - delta * std::sqrt(li * li + 1.0);
      const Mat r = resolvent(m, lambda);
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        CHECK(op_norm_scale(r, m, 0.0, s) <= std::pow(li - lambda, s - 1.0) + 1e-10);
      }
    }
  }
}

TEST_CASE("interpolation bound fails too close to the spectrum") {
  // H = diag(3), λ = 2, s = 1: ‖(H²+1)^{1/2} R_λ‖ = √10 > 1.
  const OperatorModel m = diag_model({3.0});
  CHECK(op_norm_scale(resolvent(m, 2.0), m, 0.0, 1.0) > 1.0 + 1e-3);
}

TEST_CASE("block operator algebra") {
  Rng rng(6);
  const BlockOp2 a{random_gaussian(rng, 3, 3), random_gaussian(rng, 3, 3), random_gaussian(rng, 3, 3),
                   random_gaussian(rng, 3, 3)};
  const BlockOp2 b{random_gaussian(rng, 3, 3), random_gaussian(rng, 3, 3), random_gaussian(rng, 3, 3),
                   random_gaussian(rng, 3, 3)};
  CHECK(max_abs_diff((a * b).assemble(), a.assemble() * b.assemble()) <= 1e-13);
  CHECK(max_abs_diff(a.adjoint().assemble(), a.assemble().adjoint()) == 0.0);
  CHECK(BlockOp2::split(a.assemble()).assemble() == a.assemble());
  CHECK(BlockOp2::identity(3).is_symmetric());
  CHECK_FALSE(a.is_symmetric());
  const Mat h = random_hermitian(rng, 3);
  const Mat x = random_gaussian(rng, 3, 3);
  CHECK(BlockOp2{h, x, x.adjoint(), h}.is_symmetric());
}

TEST_CASE("schur_invert examples") {
  SUBCASE("identity") {
    SchurPath path;
    const BlockOp2 inv = schur_invert(BlockOp2::identity(4), &path);
    CHECK(inv.assemble() == Mat::Identity(8, 8));
    CHECK(path == SchurPath::kSecondComplement);
  }
  SUBCASE("[[S,1],[1,-R]] has top-left (-(H-S)+λ)^{-1}") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const OperatorModel m(random_hermitian(rng, 8));
      const Mat s = 0.2 * random_hermitian(rng, 8);
      const double lambda = m.lambda_inf() - 2.0;
      const Mat r = resolvent(m, lambda);
      const Mat id = Mat::Identity(8, 8);
      const BlockOp2 inv = schur_invert(BlockOp2{s, id, id, -r});
      const Mat oracle = dense_solve_inverse(lambda * id - (m.matrix() - s));
      CHECK(rel_diff(inv.a11, oracle) <= 1e-11);
      // Bottom-right: (−H+λ)(R_S − R)(−H+λ), R_S = (−(H−S)+λ)^{-1}
      const Mat lh = lambda * id - m.matrix();
      CHECK(rel_diff(inv.a22, lh * (oracle - r) * lh) <= 1e-10);
    }
  }
  SUBCASE("random blocks against a dense inverse") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index n = 8;
      BlockOp2 b{random_gaussian(rng, n, n), random_gaussian(rng, n, n), random_gaussian(rng, n, n),
                 random_gaussian(rng, n, n)};
      b.a11 += 6.0 * Mat::Identity(n, n);
      b.a22 += 6.0 * Mat::Identity(n, n);
      const Mat oracle = dense_solve_inverse(b.assemble());
      CHECK(rel_diff(schur_invert(b).assemble(), oracle) <= 1e-11);
      CHECK(rel_diff(schur_invert(b).assemble() * b.assemble(), Mat::Identity(2 * n, 2 * n)) <= 1e-11);
    }
  }
  SUBCASE("fallback when a22 is singular") {
    Rng rng(10);
    const Eigen::Index n = 5;
    const BlockOp2 b{Mat::Zero(n, n), Mat::Identity(n, n), Mat::Identity(n, n), Mat::Zero(n, n)};
    SchurPath path;
    const BlockOp2 inv = schur_invert(b, &path);
    CHECK(path == SchurPath::kDenseFallback);
    CHECK(max_abs_diff(inv.assemble(), b.assemble()) <= 1e-15);
    CHECK_THROWS_AS(second_schur_complement(b), SingularBlock);
  }
  SUBCASE("singular block") {
    CHECK_THROWS_AS(schur_invert(BlockOp2::zero(3)), SingularBlock);
  }
}
