#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "swaprank/error.hpp"
#include "swaprank/rotation6d.hpp"

using namespace swaprank;
using swaprank::testing::random_6d;

namespace {

double max_abs_diff(const Mat3& a, const Mat3& b) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) d = std::max(d, std::abs(a.cols[c][r] - b.cols[c][r]));
    return d;
}

// Rodrigues formula written out independently of the library.
Mat3 axis_angle_oracle(Vec3 k, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = (i == j ? c : 0.0) + (1 - c) * k[i] * k[j];
            // skew part: [k]_x
            const double skew[3][3] = {{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}};
            v += s * skew[i][j];
            m.cols[j][i] = v;
        }
    return m;
}

}  // namespace

TEST_CASE("reduce_rotation keeps the first two columns") {
    const auto r6 = reduce_rotation(RotationMatrix{});
    CHECK(r6.a1 == Vec3{1, 0, 0});
    CHECK(r6.a2 == Vec3{0, 1, 0});

    const Mat3 rz = axis_angle_oracle({0, 0, 1}, M_PI / 2);
    const auto r = reduce_rotation(rz);
    CHECK(r.a1[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.a1[1] == doctest::Approx(1.0));
    CHECK(r.a2[0] == doctest::Approx(-1.0));
    CHECK(std::abs(r.a2[1]) < 1e-15);
    CHECK(std::abs(r.a1[2]) + std::abs(r.a2[2]) == 0.0);
}

TEST_CASE("reduce_rotation rejects non-rotations") {
    Mat3 m = Mat3::identity();
    m.cols[2][2] = -1.0;
    CHECK_THROWS_AS(reduce_rotation(m), InputError);
}

TEST_CASE("lift_rotation on hand-worked inputs") {
    const auto id = lift_rotation({{2, 0, 0}, {0, 3, 0}});
    CHECK(id.matrix() == Mat3::identity());

    const auto r = lift_rotation({{0, 1, 0}, {1, 1, 0}});
    CHECK(r.column(0) == Vec3{0, 1, 0});
    CHECK(r.column(1) == Vec3{1, 0, 0});
    CHECK(r.column(2) == Vec3{0, 0, -1});
    const auto check = validate_rotation(r.matrix());
    CHECK(check.pass);
    CHECK(check.determinant_deviation == 0.0);
}

TEST_CASE("lift_rotation rejects degenerate inputs") {
    CHECK_THROWS_AS(lift_rotation({{1, 0, 0}, {2, 0, 0}}), DegenerateInputError);
    CHECK_THROWS_AS(lift_rotation({{0, 0, 0}, {0, 1, 0}}), DegenerateInputError);
    CHECK_THROWS_AS(lift_rotation({{1e-10, 0, 0}, {0, 1, 0}}), DegenerateInputError);
    CHECK(Rotation6D{{1, 0, 0}, {2, 0, 0}}.degenerate());
    CHECK_FALSE(Rotation6D{{1, 0, 0}, {2, 1e-3, 0}}.degenerate());
}

TEST_CASE("validate_rotation") {
    auto ok = validate_rotation(Mat3::identity());
    CHECK(ok.pass);
    CHECK(ok.orthogonality_deviation == 0.0);
    CHECK(ok.determinant_deviation == 0.0);

    Mat3 flip = Mat3::identity();
    flip.cols[2][2] = -1.0;
    const auto improper = validate_rotation(flip);
    CHECK_FALSE(improper.pass);
    CHECK(improper.determinant_deviation == doctest::Approx(2.0));

    Mat3 twice = Mat3::identity();
    for (int i = 0; i < 3; ++i) twice.cols[i][i] = 2.0;
    const auto scaled = validate_rotation(twice);
    CHECK_FALSE(scaled.pass);
    CHECK(scaled.orthogonality_deviation == doctest::Approx(3.0));
}

TEST_CASE("lift matches the cross-product oracle and is a proper rotation") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto r6 = random_6d(rng);
        const auto r = lift_rotation(r6);
        const auto oracle = swaprank::testing::oracle_lift(r6);
        const auto flat = r.matrix().flatten();
        for (int k = 0; k < 9; ++k) REQUIRE(std::abs(flat[k] - oracle[k]) < 1e-9);
        const auto check = validate_rotation(r.matrix());
        REQUIRE(check.orthogonality_deviation < 1e-9);
        REQUIRE(check.determinant_deviation < 1e-9);
    }
}

TEST_CASE("Gram-Schmidt quotient: positive scaling and shearing along a1 do not matter") {
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
        const auto r6 = random_6d(rng, 1e-3);
        const double c1 = rng.uniform(0.1, 10.0), c2 = rng.uniform(0.1, 10.0), c3 = rng.uniform(-5.0, 5.0);
        Rotation6D moved;
        for (int k = 0; k < 3; ++k) {
            moved.a1[k] = c1 * r6.a1[k];
            moved.a2[k] = c2 * r6.a2[k] + c3 * r6.a1[k];
        }
        REQUIRE(max_abs_diff(lift_rotation(moved).matrix(), lift_rotation(r6).matrix()) < 1e-9);
    }
}

TEST_CASE("round trip and projection idempotence") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        const auto lifted = lift_rotation(random_6d(rng));
        const auto again = lift_rotation(reduce_rotation(lifted));
        REQUIRE(max_abs_diff(again.matrix(), lifted.matrix()) < 1e-9);
    }
    // An axis-angle rotation built outside the library survives the round trip.
    const Mat3 r = axis_angle_oracle({0.6, 0.0, 0.8}, 1.234);
    CHECK(max_abs_diff(lift_rotation(reduce_rotation(r)).matrix(), r) < 1e-12);
}
