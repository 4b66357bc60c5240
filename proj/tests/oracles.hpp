#ifndef QPATCH_TESTS_ORACLES_HPP
#define QPATCH_TESTS_ORACLES_HPP

// Reference implementations for cross-checking the simulator: full 2^n x 2^n
// matrices assembled from textbook gate definitions via Kronecker products
// (single-qubit gates) and explicit basis permutations (two-qubit gates),
// applied by dense matrix-vector multiplication. Shares no code with the
// library kernels.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using cdouble = std::complex<double>;
using Matrix = std::vector<std::vector<cdouble>>;

constexpr double kPi = 3.14159265358979323846;

inline Matrix identity(std::size_t dim) {
    Matrix m(dim, std::vector<cdouble>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix out(n, std::vector<cdouble>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

// Standard Kronecker product; `a` indexes the high bits of the result.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ra = a.size(), rb = b.size();
    Matrix out(ra * rb, std::vector<cdouble>(ra * rb, 0.0));
    for (std::size_t ia = 0; ia < ra; ++ia)
        for (std::size_t ja = 0; ja < ra; ++ja)
            for (std::size_t ib = 0; ib < rb; ++ib)
                for (std::size_t jb = 0; jb < rb; ++jb)
                    out[ia * rb + ib][ja * rb + jb] = a[ia][ja] * b[ib][jb];
    return out;
}

inline std::vector<cdouble> matvec(const Matrix& m, const std::vector<cdouble>& v) {
    std::vector<cdouble> out(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
    return out;
}

inline Matrix m2(cdouble a, cdouble b, cdouble c, cdouble d) {
    return {{a, b}, {c, d}};
}

inline Matrix pauli_x() { return m2(0, 1, 1, 0); }
inline Matrix pauli_y() { return m2(0, cdouble(0, -1), cdouble(0, 1), 0); }
inline Matrix pauli_z() { return m2(1, 0, 0, -1); }
inline Matrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return m2(s, s, s, -s);
}
inline Matrix s_gate() { return m2(1, 0, 0, cdouble(0, 1)); }
inline Matrix t_gate() {
    return m2(1, 0, 0, std::exp(cdouble(0, kPi / 4.0)));
}

// Rotation convention exp(-i angle sigma / 2).
inline Matrix rx(double t) {
    const double c = std::cos(t / 2.0), s = std::sin(t / 2.0);
    return m2(c, cdouble(0, -s), cdouble(0, -s), c);
}
inline Matrix ry(double t) {
    const double c = std::cos(t / 2.0), s = std::sin(t / 2.0);
    return m2(c, -s, s, c);
}
inline Matrix rz(double t) {
    return m2(std::exp(cdouble(0, -t / 2.0)), 0, 0, std::exp(cdouble(0, t / 2.0)));
}
inline Matrix rot(double a0, double a1, double a2) {
    return matmul(rz(a2), matmul(ry(a1), rz(a0)));
}

// Little-endian register: qubit 0 is the least significant bit, so its
// factor sits rightmost in the Kronecker chain.
inline Matrix one_qubit_full(int n, int target, const Matrix& g) {
    Matrix full{{1.0}};
    for (int q = n - 1; q >= 0; --q) {
        full = kron(full, q == target ? g : identity(2));
    }
    return full;
}

inline Matrix cnot_full(int n, int control, int target) {
    const std::size_t dim = std::size_t{1} << n;
    Matrix m(dim, std::vector<cdouble>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t j =
            (i >> control) & 1 ? i ^ (std::size_t{1} << target) : i;
        m[j][i] = 1.0;
    }
    return m;
}

inline Matrix cz_full(int n, int a, int b) {
    const std::size_t dim = std::size_t{1} << n;
    Matrix m(dim, std::vector<cdouble>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        const bool both = ((i >> a) & 1) && ((i >> b) & 1);
        m[i][i] = both ? -1.0 : 1.0;
    }
    return m;
}

inline Matrix swap_full(int n, int a, int b) {
    const std::size_t dim = std::size_t{1} << n;
    Matrix m(dim, std::vector<cdouble>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t bit_a = (i >> a) & 1, bit_b = (i >> b) & 1;
        std::size_t j = i;
        if (bit_a != bit_b) {
            j ^= (std::size_t{1} << a) | (std::size_t{1} << b);
        }
        m[j][i] = 1.0;
    }
    return m;
}

inline Matrix dagger(const Matrix& m) {
    Matrix out(m.size(), std::vector<cdouble>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = std::conj(m[j][i]);
    return out;
}

}  // namespace oracle

#endif  // QPATCH_TESTS_ORACLES_HPP
