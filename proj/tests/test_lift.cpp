#include "mjls/lift.hpp"
#include "testing.hpp"

#include <doctest.h>

#include <Eigen/SVD>

using namespace mjls;
using testing::Rng;

TEST_CASE("basis layout") {
    const LiftBasis b1 = make_basis(2, 1);
    CHECK(b1.indices() == std::vector<Exponent>{{1, 0}, {0, 1}});
    CHECK(b1.coeffs() == std::vector<double>{1.0, 1.0});

    const LiftBasis b2 = make_basis(2, 2);
    CHECK(b2.indices() == std::vector<Exponent>{{2, 0}, {1, 1}, {0, 2}});
    REQUIRE(b2.coeffs().size() == 3);
    CHECK(b2.coeffs()[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(b2.position({0, 2}) == 2);

    CHECK(make_basis(3, 2).size() == 6);
    CHECK(lifted_dimension(4, 3) == 20);
    CHECK_THROWS_AS((void)lifted_dimension(30, 6, 1000), LiftError);
    CHECK_THROWS_AS((void)make_basis(2, kMaxLiftDegree + 1), LiftError);
    CHECK_THROWS_AS((void)make_basis(0, 2), LiftError);
}

TEST_CASE("lift_vector values") {
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    const Vector l = lift_vector(make_basis(2, 3), e1);
    CHECK(l.size() == 4);
    CHECK(l(0) == 1.0);
    CHECK(l.tail(3).isZero(0.0));

    const Vector ones = Vector::Ones(2);
    const Vector l2 = lift_vector(make_basis(2, 2), ones);
    CHECK(l2(0) == doctest::Approx(1.0));
    CHECK(l2(1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(l2.norm() == doctest::Approx(2.0));

    CHECK_THROWS_AS((void)lift_vector(make_basis(3, 2), ones), LiftError);
}

TEST_CASE("lift preserves the norm power") {
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const int n = rng.integer(1, 4), p = rng.integer(1, 4);
        const Vector x = rng.vector(n);
        const Vector l = lift_vector(make_basis(n, p), x);
        CHECK(testing::rel_err(l.norm(), std::pow(x.norm(), p)) < 1e-12);
    }
}

TEST_CASE("lift_matrix closed forms") {
    Rng rng(11);
    const Matrix a = rng.matrix(3, 3);
    CHECK((lift_matrix(a, 1) - a).norm() == 0.0);

    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 0.7, -1.3;
    Matrix want = Matrix::Zero(3, 3);
    want.diagonal() << 1.4, -0.6, -2.6;
    CHECK((lift_matrix(d, 2) - want).norm() < 1e-15);

    // x1' = x2: d(x1^2) = sqrt2 * (sqrt2 x1 x2), d(sqrt2 x1 x2) = sqrt2 * x2^2.
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    Matrix nil2 = Matrix::Zero(3, 3);
    nil2(0, 1) = std::sqrt(2.0);
    nil2(1, 2) = std::sqrt(2.0);
    CHECK((lift_matrix(nil, 2) - nil2).norm() < 1e-15);
}

TEST_CASE("lift_matrix is linear in the generator") {
    Rng rng(12);
    for (int t = 0; t < 30; ++t) {
        const int n = rng.integer(1, 3), p = rng.integer(1, 4);
        const LiftBasis basis = make_basis(n, p);
        const Matrix a = rng.matrix(n, n), b = rng.matrix(n, n);
        const double c = rng.uniform(-3.0, 3.0);
        const Matrix la = lift_matrix(basis, a);
        CHECK((lift_matrix(basis, Matrix(c * a)) - c * la).norm() <= 1e-12 * (1.0 + la.norm()));
        const Matrix sum = lift_matrix(basis, Matrix(a + b));
        CHECK((sum - la - lift_matrix(basis, b)).norm() <= 1e-12 * (1.0 + sum.norm()));
    }
}

TEST_CASE("lifted flow matches the flow of the lift") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const int n = rng.integer(1, 3), p = rng.integer(1, 3);
        const LiftBasis basis = make_basis(n, p);
        const Matrix a = rng.matrix(n, n);
        const Vector x0 = rng.vector(n);
        const double time = rng.uniform(0.0, 2.0);
        const Vector lhs = lift_vector(basis, Vector(expm(a * time) * x0));
        const Vector rhs = expm(lift_matrix(basis, a) * time) * lift_vector(basis, x0);
        CHECK((lhs - rhs).norm() <= 1e-8 * (1.0 + lhs.norm()));
    }
}

TEST_CASE("lifted points span the lifted space") {
    Rng rng(14);
    for (int n = 1; n <= 3; ++n) {
        for (int p = 1; p <= 4; ++p) {
            const LiftBasis basis = make_basis(n, p);
            const auto np = static_cast<Eigen::Index>(basis.size());
            Matrix cols(np, np);
            for (Eigen::Index k = 0; k < np; ++k) cols.col(k) = lift_vector(basis, rng.vector(n));
            Eigen::JacobiSVD<Matrix> svd(cols);
            const auto& s = svd.singularValues();
            CHECK(s(0) / s(np - 1) < 1e8);
        }
    }
}

TEST_CASE("Metzler generators lift to Metzler generators") {
    Rng rng(15);
    for (int t = 0; t < 20; ++t) {
        const int n = rng.integer(1, 3), p = rng.integer(1, 4);
        const Matrix l = lift_matrix(rng.metzler(n), p);
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            for (Eigen::Index j = 0; j < l.cols(); ++j)
                if (i != j) CHECK(l(i, j) >= 0.0);
    }
}
