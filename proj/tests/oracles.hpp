#pragma once

// Reference computations for the tests. Nothing here calls the library's own
// elimination, Newton or enumeration code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Leibniz expansion over all permutations.
inline C leibniz_det(const Mat& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    C total = 0.0;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) inversions += p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)];
        }
        C term = inversions % 2 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) term *= m(i, p[static_cast<std::size_t>(i)]);
        total += term;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

/// Closed-form Fourier matrix and its inverse g^dagger / n.
inline Mat fourier(int n) {
    Mat g(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) g(j, k) = std::polar(1.0, 2.0 * kPi * j * k / n);
    }
    return g;
}

inline Mat fourier_inverse(int n) { return fourier(n).adjoint() / static_cast<double>(n); }

/// Closed-form 2x2 inverse.
inline Mat inverse2(const Mat& m) {
    const C d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Mat r(2, 2);
    r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return r / d;
}

/// F(g) = sum_ij lambda_ij log g_ji - log det g on one branch, evaluated with
/// a Leibniz determinant so it is independent of the library.
inline C potential(const Mat& g, const Mat& lambda) {
    C f = -std::log(leibniz_det(g));
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) f += lambda(i, j) * std::log(g(j, i));
    }
    return f;
}

/// Central-difference derivative of F with respect to g_rc.
inline C potential_partial(const Mat& g, const Mat& lambda, int r, int c, double h) {
    Mat plus = g;
    Mat minus = g;
    plus(r, c) += h;
    minus(r, c) -= h;
    return (potential(plus, lambda) - potential(minus, lambda)) / (2.0 * h);
}

/// Free-slice gradient of F from the raw formula a_ij = lambda_ij / g_ji - ghat_ij,
/// with the inverse taken by Eigen's LU.
inline std::vector<C> free_gradient(const Mat& g, const Mat& lambda) {
    const int n = static_cast<int>(g.rows());
    const Mat gi = g.inverse();
    std::vector<C> out;
    for (int r = 1; r < n; ++r) {
        for (int c = 1; c < n; ++c) out.push_back(lambda(c, r) / g(r, c) - gi(c, r));
    }
    return out;
}

/// Central-difference Jacobian of free_gradient in the free coordinates.
inline Mat gradient_jacobian(const Mat& g, const Mat& lambda, double h) {
    const int n = static_cast<int>(g.rows());
    const int m = (n - 1) * (n - 1);
    Mat jac(m, m);
    for (int col = 0; col < m; ++col) {
        Mat plus = g;
        Mat minus = g;
        plus(1 + col / (n - 1), 1 + col % (n - 1)) += h;
        minus(1 + col / (n - 1), 1 + col % (n - 1)) -= h;
        const auto gp = free_gradient(plus, lambda);
        const auto gm = free_gradient(minus, lambda);
        for (int row = 0; row < m; ++row) jac(row, col) = (gp[static_cast<std::size_t>(row)] - gm[static_cast<std::size_t>(row)]) / (2.0 * h);
    }
    return jac;
}

/// Divides rows and columns so the first row and column become 1.
inline Mat to_slice(const Mat& g) {
    Mat r(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) r(i, j) = g(i, j) * g(0, 0) / (g(i, 0) * g(0, j));
    }
    return r;
}

/// Smallest max-entry distance between b and the slice form of any row and
/// column permutation of a (transposes included).
inline double congruence_distance(const Mat& a, const Mat& b) {
    const int n = static_cast<int>(a.rows());
    std::vector<int> rp(static_cast<std::size_t>(n));
    double best = INFINITY;
    for (const bool transpose : {false, true}) {
        const Mat src = transpose ? Mat(a.transpose()) : a;
        std::iota(rp.begin(), rp.end(), 0);
        do {
            std::vector<int> cp(static_cast<std::size_t>(n));
            std::iota(cp.begin(), cp.end(), 0);
            do {
                Mat m(n, n);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) m(i, j) = src(rp[static_cast<std::size_t>(i)], cp[static_cast<std::size_t>(j)]);
                }
                best = std::min(best, (to_slice(m) - b).cwiseAbs().maxCoeff());
            } while (std::next_permutation(cp.begin(), cp.end()));
        } while (std::next_permutation(rp.begin(), rp.end()));
    }
    return best;
}

}  // namespace oracle
