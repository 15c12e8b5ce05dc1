#include <cmath>
#include <numbers>

#include "doctest.h"
#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"
#include "test_support.hpp"

using namespace learnpath;
using namespace learnpath::matfun;

TEST_CASE("sym_eig of identity and diagonal") {
  const SymEig id = sym_eig(Matrix::Identity(2, 2));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));
  CHECK((id.eigenvectors - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 9.0;
  d(1, 1) = 4.0;
  const SymEig e = sym_eig(d);
  CHECK(e.eigenvalues(0) == doctest::Approx(4.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(9.0));
  CHECK(std::abs(e.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 8; ++n) {
    const Matrix a = testsupport::random_symmetric(rng, n);
    const SymEig e = sym_eig(a);
    const Matrix back = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
    CHECK(testsupport::rel_fro(back, a) <= 1e-10);
    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    for (int i = 1; i < n; ++i) CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
    for (int c = 0; c < n; ++c) {
      Eigen::Index arg;
      e.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(e.eigenvectors(arg, c) > 0.0);
    }
  }
}

TEST_CASE("sym_eig rejects bad input") {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(sym_eig(a), Error);
  Matrix b = Matrix::Identity(2, 2);
  b(0, 1) = 1e-3;
  try {
    sym_eig(b);
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kInvalidInput);
  }
  // tiny asymmetry is symmetrized away
  b(0, 1) = 1e-12;
  CHECK_NOTHROW(sym_eig(b));
}

TEST_CASE("spd_sqrt") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Matrix s = spd_sqrt(d);
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(s(0, 1)) < 1e-14);
  CHECK((spd_sqrt(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 10;
    const Matrix a = testsupport::random_spd(rng, n, 0.01, 100.0);
    const Matrix r = spd_sqrt(a);
    CHECK(testsupport::rel_fro(r * r, a) <= 1e-8);
    CHECK((r - r.transpose()).norm() < 1e-12);
    CHECK(testsupport::rel_fro(spd_inv_sqrt(a) * r, Matrix::Identity(n, n)) <= 1e-8);
    CHECK(testsupport::rel_fro(spd_inverse(a) * a, Matrix::Identity(n, n)) <= 1e-8);
  }
}

TEST_CASE("spd_sqrt floor raises SingularMatrix naming the eigenvalue") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-14;
  try {
    spd_sqrt(a);
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kSingularMatrix);
    CHECK(std::string(err.what()).find("1e-14") != std::string::npos);
  }
  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(spd_inverse(neg), Error);
}

TEST_CASE("pair_sqrt") {
  const Matrix h = Matrix::Identity(3, 3);
  const auto r = pair_sqrt(4.0 * Matrix::Identity(3, 3), h);
  CHECK((r.value - 0.5 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 10;
    const Matrix g = testsupport::random_spd(rng, n, 0.1, 10.0);
    const Matrix hh = testsupport::random_spd(rng, n, 0.1, 10.0);
    const auto p = pair_sqrt(g, hh);
    const Matrix target = g.llt().solve(hh);
    CHECK(testsupport::rel_fro(p.value * p.value, target) <= 1e-8);
    CHECK(p.smallest_eigenvalue > 0.0);
    const auto plain = pair_sqrt(Matrix::Identity(n, n), hh);
    CHECK(testsupport::rel_fro(plain.value, spd_sqrt(hh)) <= 1e-12);
  }
}

TEST_CASE("pair_function matches pair_sqrt and inverse") {
  std::mt19937_64 rng(23);
  const Matrix g = testsupport::random_spd(rng, 4);
  const Matrix h = testsupport::random_spd(rng, 4);
  const Matrix viaf = pair_function(g, h, [](double x) { return std::sqrt(x); });
  CHECK(testsupport::rel_fro(viaf, pair_sqrt(g, h).value) <= 1e-12);
  const Matrix inv = pair_function(g, h, [](double x) { return 1.0 / x; });
  CHECK(testsupport::rel_fro(inv, h.llt().solve(g)) <= 1e-10);
}

TEST_CASE("mat_exp basics") {
  CHECK(mat_exp(Matrix::Zero(3, 3), 2.0) == Matrix::Identity(3, 3));
  CHECK(mat_exp(Matrix::Identity(2, 2), 0.0) == Matrix::Identity(2, 2));

  Matrix gen(2, 2);
  gen << 0.0, -1.0, 1.0, 0.0;
  const Matrix rot = mat_exp(gen, std::numbers::pi / 2.0);
  CHECK((rot - gen).cwiseAbs().maxCoeff() < 1e-14);
  const Matrix rot_t = mat_exp(gen, 0.7);
  CHECK(rot_t(0, 0) == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
  CHECK(rot_t(1, 0) == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
}

TEST_CASE("mat_exp of symmetric matrices agrees with the eigenbasis route") {
  std::mt19937_64 rng(29);
  for (int n = 1; n <= 6; ++n) {
    const Matrix a = testsupport::random_symmetric(rng, n);
    for (double t : {-3.0, 0.1, 1.0, 5.0}) {
      const SymEig e = sym_eig(a);
      const Matrix oracle = sym_function(e, [t](double x) { return std::exp(x * t); });
      CHECK(testsupport::rel_fro(mat_exp(a, t), oracle) <= 1e-9);
    }
  }
}

TEST_CASE("mat_exp semigroup and skew orthogonality") {
  std::mt19937_64 rng(31);
  for (int n = 1; n <= 6; ++n) {
    const Matrix a = testsupport::random_matrix(rng, n, n);
    const Matrix prod = mat_exp(a, 0.4) * mat_exp(a, 1.3);
    CHECK(testsupport::rel_fro(prod, mat_exp(a, 1.7)) <= 1e-8);

    const Matrix skew = a - a.transpose();
    const Matrix q = mat_exp(skew, 2.5);
    CHECK((q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(q.determinant() - 1.0) <= 1e-8);
  }
}

TEST_CASE("mat_exp overflow") {
  Matrix a = Matrix::Identity(2, 2);
  try {
    mat_exp(a, 1e6);
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kNumericOverflow);
  }
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(mat_exp(bad, 1.0), Error);
}
