#include "unbiased/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "unbiased/errors.hpp"

namespace unbiased {

namespace {

void require_finite(const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                throw PreconditionError("matrix entry (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is not finite");
            }
        }
    }
}

double max_row_norm(const Eigen::MatrixXcd& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
}

}  // namespace

void require_same_dimension(const ComplexSquareMatrix& a, const ComplexSquareMatrix& b) {
    if (a.n() != b.n()) throw PreconditionError("matrix dimensions differ");
}

ComplexSquareMatrix::ComplexSquareMatrix(int n) {
    if (n < 1) throw PreconditionError("matrix dimension must be positive");
    m_ = Eigen::MatrixXcd::Zero(n, n);
}

ComplexSquareMatrix::ComplexSquareMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw PreconditionError("matrix must be square with positive dimension");
    }
    require_finite(m_);
}

ComplexSquareMatrix::ComplexSquareMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 1) throw PreconditionError("matrix dimension must be positive");
    m_.resize(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != n) throw PreconditionError("matrix literal is not square");
        Eigen::Index j = 0;
        for (const auto& v : row) m_(i, j++) = v;
        ++i;
    }
    require_finite(m_);
}

ComplexSquareMatrix ComplexSquareMatrix::identity(int n) {
    if (n < 1) throw PreconditionError("matrix dimension must be positive");
    return ComplexSquareMatrix(Eigen::MatrixXcd::Identity(n, n));
}

ComplexSquareMatrix ComplexSquareMatrix::unit(int n, int i, int j) {
    if (n < 1 || i < 0 || j < 0 || i >= n || j >= n) throw PreconditionError("matrix unit index out of range");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(i, j) = 1.0;
    return ComplexSquareMatrix(std::move(m));
}

ComplexSquareMatrix ComplexSquareMatrix::diagonal(const std::vector<Complex>& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return ComplexSquareMatrix(std::move(m));
}

ComplexSquareMatrix ComplexSquareMatrix::operator+(const ComplexSquareMatrix& o) const {
    require_same_dimension(*this, o);
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_ + o.m_));
}

ComplexSquareMatrix ComplexSquareMatrix::operator-(const ComplexSquareMatrix& o) const {
    require_same_dimension(*this, o);
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_ - o.m_));
}

ComplexSquareMatrix ComplexSquareMatrix::operator*(const ComplexSquareMatrix& o) const {
    require_same_dimension(*this, o);
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_ * o.m_));
}

ComplexSquareMatrix ComplexSquareMatrix::operator*(Complex s) const {
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_ * s));
}

ComplexSquareMatrix ComplexSquareMatrix::adjoint() const {
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_.adjoint()));
}

ComplexSquareMatrix ComplexSquareMatrix::transpose() const {
    return ComplexSquareMatrix(Eigen::MatrixXcd(m_.transpose()));
}

double ComplexSquareMatrix::operator_norm() const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m_);
    return svd.singularValues()(0);
}

double ComplexSquareMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

Complex det(const ComplexSquareMatrix& m) {
    Eigen::MatrixXcd a = m.eigen();
    const int n = m.n();
    Complex result = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (a(pivot, col) == Complex(0.0)) return 0.0;
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            result = -result;
        }
        result *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / a(col, col);
            a.row(r).tail(n - col) -= f * a.row(col).tail(n - col);
        }
    }
    return result;
}

ComplexSquareMatrix invert(const ComplexSquareMatrix& m, double floor_factor) {
    const int n = m.n();
    Eigen::MatrixXcd a = m.eigen();
    Eigen::MatrixXcd inv = Eigen::MatrixXcd::Identity(n, n);
    const double floor = floor_factor * max_row_norm(a);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        const double mag = std::abs(a(pivot, col));
        if (!(mag > floor)) throw SingularMatrix(mag, floor);
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            inv.row(pivot).swap(inv.row(col));
        }
        const Complex p = a(col, col);
        a.row(col) /= p;
        inv.row(col) /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a(r, col);
            if (f == Complex(0.0)) continue;
            a.row(r) -= f * a.row(col);
            inv.row(r) -= f * inv.row(col);
        }
    }
    return ComplexSquareMatrix(std::move(inv));
}

SpectrumReport singular_spectrum(const Eigen::MatrixXcd& m, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("spectrum tolerance must be positive");
    SpectrumReport report;
    report.tolerance_used = tol;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    report.values.assign(sv.data(), sv.data() + sv.size());
    std::sort(report.values.begin(), report.values.end(), std::greater<>());
    const int dim = static_cast<int>(std::min(m.rows(), m.cols()));
    const double largest = report.values.empty() ? 0.0 : report.values.front();
    if (largest < kSpectrumAbsoluteFloor) {
        report.nullity = dim;
    } else {
        report.nullity = static_cast<int>(std::count_if(report.values.begin(), report.values.end(),
                                                        [&](double v) { return v < tol * largest; }));
    }
    report.rank = dim - report.nullity;
    return report;
}

SpectrumReport singular_spectrum(const ComplexSquareMatrix& m, double tol) {
    return singular_spectrum(m.eigen(), tol);
}

int numeric_rank(const ComplexSquareMatrix& m, double tol) { return singular_spectrum(m, tol).rank; }

ComplexSquareMatrix fourier_matrix(int n) {
    if (n < 1) throw PreconditionError("fourier_matrix requires n >= 1");
    Eigen::MatrixXcd f(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            // Reduce jk mod n first so the angle stays in [0, 2 pi).
            const int r = (j * k) % n;
            if (r == 0) {
                f(j, k) = 1.0;
            } else if (2 * r == n) {
                f(j, k) = -1.0;
            } else {
                f(j, k) = std::polar(1.0, 2.0 * std::numbers::pi * r / n);
            }
        }
    }
    return ComplexSquareMatrix(std::move(f));
}

ComplexSquareMatrix random_torus_matrix(int n, std::uint64_t seed, ModulusRange range) {
    if (n < 1) throw PreconditionError("random_torus_matrix requires n >= 1");
    if (!(range.low > 0.0) || !(range.low <= range.high)) {
        throw PreconditionError("modulus range must satisfy 0 < low <= high");
    }
    SplitMix64 rng(seed);
    const double log_lo = std::log(range.low);
    const double log_hi = std::log(range.high);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double modulus = std::clamp(std::exp(rng.uniform(log_lo, log_hi)), range.low, range.high);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            m(i, j) = std::polar(modulus, phase);
        }
    }
    return ComplexSquareMatrix(std::move(m));
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    mix.next();
    return mix.next();
}

}  // namespace unbiased
