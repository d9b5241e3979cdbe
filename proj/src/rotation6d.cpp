#include "swaprank/rotation6d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swaprank/error.hpp"

namespace swaprank {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

double determinant(const Mat3& m) { return dot(m.cols[0], cross(m.cols[1], m.cols[2])); }

Mat3 Mat3::identity() { return Mat3{{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}}; }

Mat3 Mat3::from_rows(const std::array<Vec3, 3>& rows) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m.cols[c][r] = rows[r][c];
    return m;
}

std::array<double, 9> Mat3::flatten() const {
    std::array<double, 9> out{};
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) out[3 * c + r] = cols[c][r];
    return out;
}

RotationCheck validate_rotation(const Mat3& m) {
    RotationCheck check;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // (R^T R)_ij is the dot product of columns i and j.
            const double expected = i == j ? 1.0 : 0.0;
            const double dev = std::abs(dot(m.cols[i], m.cols[j]) - expected);
            check.orthogonality_deviation = std::max(check.orthogonality_deviation, dev);
        }
    }
    check.determinant_deviation = std::abs(determinant(m) - 1.0);
    check.pass = std::isfinite(check.orthogonality_deviation) && std::isfinite(check.determinant_deviation) &&
                 check.orthogonality_deviation <= kRotationTolerance &&
                 check.determinant_deviation <= kRotationTolerance;
    return check;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
    const RotationCheck check = validate_rotation(m);
    if (!check.pass) {
        throw InputError("not a proper rotation: orthogonality deviation " +
                         std::to_string(check.orthogonality_deviation) + ", determinant deviation " +
                         std::to_string(check.determinant_deviation));
    }
    return RotationMatrix(m);
}

bool Rotation6D::degenerate() const {
    const double n1 = norm(a1);
    if (!(n1 > kDegeneracyEpsilon)) return true;
    const Vec3 b1{a1[0] / n1, a1[1] / n1, a1[2] / n1};
    const double proj = dot(b1, a2);
    const Vec3 u2{a2[0] - proj * b1[0], a2[1] - proj * b1[1], a2[2] - proj * b1[2]};
    return !(norm(u2) > kDegeneracyEpsilon);
}

Rotation6D reduce_rotation(const RotationMatrix& r) { return {r.column(0), r.column(1)}; }

Rotation6D reduce_rotation(const Mat3& m) { return reduce_rotation(RotationMatrix::from_matrix(m)); }

RotationMatrix lift_rotation(const Rotation6D& r6) {
    const double n1 = norm(r6.a1);
    if (!(n1 > kDegeneracyEpsilon)) throw DegenerateInputError("6D rotation: first column has (near) zero norm");
    const Vec3 b1{r6.a1[0] / n1, r6.a1[1] / n1, r6.a1[2] / n1};

    const double proj = dot(b1, r6.a2);
    const Vec3 u2{r6.a2[0] - proj * b1[0], r6.a2[1] - proj * b1[1], r6.a2[2] - proj * b1[2]};
    const double n2 = norm(u2);
    if (!(n2 > kDegeneracyEpsilon)) throw DegenerateInputError("6D rotation: second column is parallel to the first");
    const Vec3 b2{u2[0] / n2, u2[1] / n2, u2[2] / n2};

    return RotationMatrix(Mat3{{b1, b2, cross(b1, b2)}});
}

}  // namespace swaprank
