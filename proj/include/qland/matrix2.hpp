#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qland {

using complexd = std::complex<double>;

/// Dense 2x2 complex matrix, row-major. Value type; all operations are pure.
class Matrix2 {
public:
    constexpr Matrix2() : e_{} {}
    constexpr Matrix2(complexd a, complexd b, complexd c, complexd d) : e_{a, b, c, d} {}

    static constexpr Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Matrix2 zero() { return {}; }

    complexd& operator()(std::size_t row, std::size_t col) { return e_[2 * row + col]; }
    const complexd& operator()(std::size_t row, std::size_t col) const { return e_[2 * row + col]; }

    friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
        return {x.e_[0] * y.e_[0] + x.e_[1] * y.e_[2], x.e_[0] * y.e_[1] + x.e_[1] * y.e_[3],
                x.e_[2] * y.e_[0] + x.e_[3] * y.e_[2], x.e_[2] * y.e_[1] + x.e_[3] * y.e_[3]};
    }
    friend Matrix2 operator+(const Matrix2& x, const Matrix2& y) {
        return {x.e_[0] + y.e_[0], x.e_[1] + y.e_[1], x.e_[2] + y.e_[2], x.e_[3] + y.e_[3]};
    }
    friend Matrix2 operator-(const Matrix2& x, const Matrix2& y) {
        return {x.e_[0] - y.e_[0], x.e_[1] - y.e_[1], x.e_[2] - y.e_[2], x.e_[3] - y.e_[3]};
    }
    friend Matrix2 operator*(complexd s, const Matrix2& x) {
        return {s * x.e_[0], s * x.e_[1], s * x.e_[2], s * x.e_[3]};
    }
    friend Matrix2 operator*(const Matrix2& x, complexd s) { return s * x; }

    Matrix2 dagger() const {
        return {std::conj(e_[0]), std::conj(e_[2]), std::conj(e_[1]), std::conj(e_[3])};
    }

    complexd trace() const { return e_[0] + e_[3]; }
    complexd det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

    /// max-norm of the entries
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : e_) m = std::max(m, std::abs(z));
        return m;
    }

    /// ||U^dagger U - I||_max; zero for an exactly unitary matrix
    double unitarity_defect() const {
        return (dagger() * *this - identity()).max_abs();
    }

private:
    std::array<complexd, 4> e_;
};

inline Matrix2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Matrix2 pauli_y() { return {0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0}; }
inline Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

} // namespace qland
