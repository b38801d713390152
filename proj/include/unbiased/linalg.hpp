#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace unbiased {

using Complex = std::complex<double>;

/// Dense n x n complex matrix with finite entries.
///
/// Transition matrices, their inverses, projectors and cotangent data all live
/// here. The wrapper validates shape and finiteness at construction and is
/// immutable afterwards; arithmetic returns new values.
class ComplexSquareMatrix {
public:
    explicit ComplexSquareMatrix(int n);
    explicit ComplexSquareMatrix(Eigen::MatrixXcd entries);
    ComplexSquareMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexSquareMatrix identity(int n);
    /// Matrix unit E_ij (0-based).
    static ComplexSquareMatrix unit(int n, int i, int j);
    static ComplexSquareMatrix diagonal(const std::vector<Complex>& d);

    int n() const noexcept { return static_cast<int>(m_.rows()); }
    Complex operator()(int i, int j) const { return m_(i, j); }
    const Eigen::MatrixXcd& eigen() const noexcept { return m_; }

    ComplexSquareMatrix operator+(const ComplexSquareMatrix& o) const;
    ComplexSquareMatrix operator-(const ComplexSquareMatrix& o) const;
    ComplexSquareMatrix operator*(const ComplexSquareMatrix& o) const;
    ComplexSquareMatrix operator*(Complex s) const;
    friend ComplexSquareMatrix operator*(Complex s, const ComplexSquareMatrix& m) { return m * s; }

    ComplexSquareMatrix adjoint() const;
    ComplexSquareMatrix transpose() const;
    Complex trace() const { return m_.trace(); }
    /// Largest singular value.
    double operator_norm() const;
    double max_abs() const;

private:
    Eigen::MatrixXcd m_;
};

/// Throws PreconditionError when the dimensions differ.
void require_same_dimension(const ComplexSquareMatrix& a, const ComplexSquareMatrix& b);

struct SpectrumReport {
    std::vector<double> values;  // descending
    int rank = 0;
    int nullity = 0;
    double tolerance_used = 0.0;
};

/// Values below this are treated as an all-zero spectrum.
inline constexpr double kSpectrumAbsoluteFloor = 1e-14;
/// Default relative pivot floor used by invert().
inline constexpr double kPivotFloorFactor = 1e-12;

Complex det(const ComplexSquareMatrix& m);

/// Inverse by partially pivoted Gauss-Jordan elimination.
/// Throws SingularMatrix when a pivot falls below floor_factor * (max row 1-norm).
ComplexSquareMatrix invert(const ComplexSquareMatrix& m, double floor_factor = kPivotFloorFactor);

/// Singular values with numeric rank at relative tolerance tol.
SpectrumReport singular_spectrum(const ComplexSquareMatrix& m, double tol);
SpectrumReport singular_spectrum(const Eigen::MatrixXcd& m, double tol);

int numeric_rank(const ComplexSquareMatrix& m, double tol);

/// g_jk = exp(2 pi i jk / n), j,k = 0..n-1.
ComplexSquareMatrix fourier_matrix(int n);

struct ModulusRange {
    double low = 0.5;
    double high = 2.0;
};

/// Seeded random point of the torus (C*)^{n^2}: uniform phase, log-uniform modulus.
ComplexSquareMatrix random_torus_matrix(int n, std::uint64_t seed, ModulusRange range = {});

/// SplitMix64. Counter-based: state advances by the golden-ratio increment and
/// each output is a fixed mix of the state, so streams are identical on every
/// platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box-Muller.
    double normal();

private:
    std::uint64_t state_;
};

/// Independent seed for sub-stream `index` of a run seeded by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace unbiased
