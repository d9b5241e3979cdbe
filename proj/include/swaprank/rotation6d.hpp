#pragma once

#include <array>

namespace swaprank {

using Vec3 = std::array<double, 3>;

// Plain 3x3 matrix stored as three columns.
struct Mat3 {
    std::array<Vec3, 3> cols{};

    double at(int row, int col) const { return cols[col][row]; }
    static Mat3 identity();
    static Mat3 from_rows(const std::array<Vec3, 3>& rows);
    // Column-major flattening: (c0, c1, c2).
    std::array<double, 9> flatten() const;

    friend bool operator==(const Mat3&, const Mat3&) = default;
};

inline constexpr double kRotationTolerance = 1e-8;
inline constexpr double kDegeneracyEpsilon = 1e-9;

struct RotationCheck {
    bool pass = false;
    double orthogonality_deviation = 0.0;  // max |(R^T R - I)_ij|
    double determinant_deviation = 0.0;    // |det R - 1|
};

RotationCheck validate_rotation(const Mat3& m);

struct Rotation6D;

// Proper rotation matrix. Construction from arbitrary entries is checked.
class RotationMatrix {
public:
    RotationMatrix() : m_(Mat3::identity()) {}

    // Throws InputError if `m` is not in SO(3) within kRotationTolerance.
    static RotationMatrix from_matrix(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    const Vec3& column(int i) const { return m_.cols[i]; }

    friend bool operator==(const RotationMatrix&, const RotationMatrix&) = default;

private:
    explicit RotationMatrix(const Mat3& m) : m_(m) {}
    friend RotationMatrix lift_rotation(const Rotation6D&);
    Mat3 m_;
};

// First two columns of a rotation matrix. Raw network outputs may be arbitrary
// (unnormalised, non-orthogonal); lift_rotation maps them back to SO(3).
struct Rotation6D {
    Vec3 a1{1.0, 0.0, 0.0};
    Vec3 a2{0.0, 1.0, 0.0};

    std::array<double, 6> flatten() const { return {a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]}; }
    static Rotation6D from_flat(const std::array<double, 6>& v) {
        return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    }
    // True when ||a1|| or the component of a2 orthogonal to a1 is <= kDegeneracyEpsilon.
    bool degenerate() const;

    friend bool operator==(const Rotation6D&, const Rotation6D&) = default;
};

// Drops the third column.
Rotation6D reduce_rotation(const RotationMatrix& r);
// Checked variant for raw matrices; throws InputError when `m` is not a rotation.
Rotation6D reduce_rotation(const Mat3& m);

// Gram-Schmidt on (a1, a2), third column from the cross product.
// Throws DegenerateInputError when r6.degenerate().
RotationMatrix lift_rotation(const Rotation6D& r6);

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
double determinant(const Mat3& m);

}  // namespace swaprank
