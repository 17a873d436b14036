#include "mjls/system.hpp"
#include "testing.hpp"

#include <doctest.h>

using namespace mjls;
using testing::Rng;

TEST_CASE("rotation system is valid") {
    CHECK(validate(testing::rotations()).empty());
    CHECK_NOTHROW(require_valid(testing::rotations()));
}

TEST_CASE("row-sum violation names the row") {
    JumpSystem s = testing::rotations();
    s.generator << -1, 0.5, 1, -1;
    const auto v = validate(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].row == 0);
    CHECK(v[0].message.find("-0.5") != std::string::npos);
    CHECK_THROWS_AS(require_valid(s), ValidationError);
}

TEST_CASE("negative off-diagonal rate") {
    JumpSystem s = testing::rotations();
    s.generator << 1, -1, 1, -1;
    const auto v = validate(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].row == 0);
    CHECK(v[0].col == 1);
}

TEST_CASE("shape and finiteness problems are reported, not thrown") {
    JumpSystem s = testing::rotations();
    s.modes[1] = Matrix::Zero(3, 3);
    s.modes[0](0, 0) = std::nan("");
    s.generator = Matrix::Zero(3, 3);
    std::vector<Violation> v;
    CHECK_NOTHROW(v = validate(s));
    CHECK(v.size() == 3);
    CHECK(validate(s).size() == v.size());

    CHECK_FALSE(validate(JumpSystem{}).empty());
}

TEST_CASE("absorbing modes are accepted") {
    JumpSystem s = testing::rotations();
    s.generator << 0, 0, 1, -1;
    CHECK(validate(s).empty());
    CHECK(exit_rate(s, 0) == 0.0);
    CHECK(jump_probabilities(s, 0).isZero(0.0));
}

TEST_CASE("Metzler detection") {
    CHECK_FALSE(is_metzler(testing::rotations().modes[0]));
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << -4, 2, 0;
    CHECK(is_metzler(d));
    Rng rng(20);
    for (int t = 0; t < 10; ++t) CHECK(is_metzler(rng.metzler(rng.integer(1, 4), -1.0)));
    CHECK_FALSE(is_positive_system(testing::unstable_pair()));
}

TEST_CASE("jump probabilities form a distribution") {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        JumpSystem s = rng.system(rng.integer(2, 5), 1);
        REQUIRE(validate(s).empty());
        for (int i = 0; i < s.mode_count(); ++i) {
            const Vector p = jump_probabilities(s, i);
            CHECK(std::abs(p.sum() - 1.0) < 1e-12);
            CHECK(p(i) == 0.0);
        }
    }
}
