#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mamix {

/// Thrown for malformed arguments: bad rectangles, unknown problem names,
/// out-of-range degrees, negative sources, dimension mismatches.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

using Point = Vec2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Dense 2x2 matrix, row-major.
struct Mat2 {
    double xx = 0.0, xy = 0.0;
    double yx = 0.0, yy = 0.0;

    double det() const { return xx * yy - xy * yx; }
    Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
    Mat2 transpose() const { return {xx, yx, xy, yy}; }
    Mat2 inverse() const
    {
        const double d = det();
        return {yy / d, -xy / d, -yx / d, xx / d};
    }
};

}  // namespace mamix
