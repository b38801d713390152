#include "unbiased/potential.hpp"

#include <cmath>

#include "unbiased/errors.hpp"

namespace unbiased {

namespace {

void require_square_weights(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    if (w.k() != w.n() || w.n() != g.n()) {
        throw PreconditionError("weights must be n x n with n matching the transition matrix");
    }
}

}  // namespace

WeightMatrix::WeightMatrix(int k, int n, Eigen::MatrixXcd entries) : k_(k), n_(n), w_(std::move(entries)) {
    if (k < 1 || n < 1 || w_.rows() != k || w_.cols() != n) {
        throw PreconditionError("weight matrix shape does not match (k, n)");
    }
}

WeightMatrix WeightMatrix::top_rows(int rows) const {
    if (rows < 1 || rows > k_) throw PreconditionError("top_rows out of range");
    return WeightMatrix(rows, n_, w_.topRows(rows));
}

WeightMatrix uniform_weights(int n) {
    if (n < 1) throw PreconditionError("uniform_weights requires n >= 1");
    return WeightMatrix(n, n, Eigen::MatrixXcd::Constant(n, n, Complex(1.0 / n)));
}

std::string to_string(WeightViolation::Kind kind) {
    switch (kind) {
        case WeightViolation::Kind::ZeroEntry: return "nonzero";
        case WeightViolation::Kind::RowSum: return "row_sum";
        case WeightViolation::Kind::ColumnSum: return "column_sum";
    }
    return "unknown";
}

WeightReport validate_weights(const WeightMatrix& w) {
    WeightReport report;
    for (int i = 0; i < w.k(); ++i) {
        for (int j = 0; j < w.n(); ++j) {
            if (w(i, j) == Complex(0.0)) {
                report.violations.push_back({WeightViolation::Kind::ZeroEntry, {i, j}, 0.0});
            }
        }
    }
    for (int i = 0; i < w.k(); ++i) {
        const double dev = std::abs(w.eigen().row(i).sum() - Complex(1.0));
        if (dev > kWeightSumTolerance) report.violations.push_back({WeightViolation::Kind::RowSum, {i}, dev});
    }
    for (int j = 0; j < w.n(); ++j) {
        const double dev = std::abs(w.eigen().col(j).sum() - Complex(1.0));
        if (dev <= kWeightSumTolerance) continue;
        WeightViolation v{WeightViolation::Kind::ColumnSum, {j}, dev};
        if (w.k() == w.n()) {
            report.violations.push_back(v);
        } else {
            report.notes.push_back(v);
        }
    }
    report.valid = report.violations.empty();
    return report;
}

GaugeSlicePoint::GaugeSlicePoint(int n, std::vector<Complex> free_entries) : n_(n), free_(std::move(free_entries)) {
    if (n < 1) throw PreconditionError("slice dimension must be positive");
    if (free_.size() != static_cast<std::size_t>((n - 1) * (n - 1))) {
        throw PreconditionError("slice point needs (n-1)^2 free entries");
    }
    for (std::size_t idx = 0; idx < free_.size(); ++idx) {
        if (free_[idx] == Complex(0.0)) {
            throw ZeroEntry(static_cast<int>(idx) / (n - 1) + 1, static_cast<int>(idx) % (n - 1) + 1);
        }
        if (!std::isfinite(free_[idx].real()) || !std::isfinite(free_[idx].imag())) {
            throw PreconditionError("slice point entry is not finite");
        }
    }
}

ComplexSquareMatrix GaugeSlicePoint::embed() const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Ones(n_, n_);
    for (int r = 1; r < n_; ++r) {
        for (int c = 1; c < n_; ++c) g(r, c) = free_[static_cast<std::size_t>((r - 1) * (n_ - 1) + (c - 1))];
    }
    return ComplexSquareMatrix(std::move(g));
}

void require_nonzero_entries(const ComplexSquareMatrix& g) {
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            if (g(i, j) == Complex(0.0)) throw ZeroEntry(i, j);
        }
    }
}

GradientMatrix grad_F(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    require_square_weights(g, w);
    require_nonzero_entries(g);
    const ComplexSquareMatrix ghat = invert(g);
    const int n = g.n();
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = w(i, j) / g(j, i) - ghat(i, j);
    }
    return {ComplexSquareMatrix(std::move(a))};
}

CriticalResidual critical_residual(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    require_square_weights(g, w);
    require_nonzero_entries(g);
    const int n = g.n();
    CriticalResidual out;
    out.per_equation.reserve(static_cast<std::size_t>(n * (n - 1)));
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            Complex s = 0.0;
            for (int j = 0; j < n; ++j) s += w(j, k) * g(i, j) / g(k, j);
            out.per_equation.push_back(s);
            sq += std::norm(s);
        }
    }
    out.norm = std::sqrt(sq);
    return out;
}

Complex potential_power(const ComplexSquareMatrix& g) {
    require_nonzero_entries(g);
    const int n = g.n();
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) prod *= g(i, j);
    }
    return std::pow(det(g), n) / prod;
}

Complex log_potential(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    require_square_weights(g, w);
    require_nonzero_entries(g);
    invert(g);  // singularity check
    const int n = g.n();
    Complex s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s += w(i, j) * std::log(g(j, i));
    }
    return s - std::log(det(g));
}

std::vector<Complex> free_gradient(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    const GradientMatrix grad = grad_F(g, w);
    const int n = g.n();
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (int r = 1; r < n; ++r) {
        for (int c = 1; c < n; ++c) out.push_back(grad.a(c, r));
    }
    return out;
}

ComplexSquareMatrix hessian_slice(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    require_square_weights(g, w);
    require_nonzero_entries(g);
    const ComplexSquareMatrix ghat = invert(g);
    const int n = g.n();
    const int m = n - 1;
    if (m == 0) throw PreconditionError("hessian_slice needs n >= 2");
    Eigen::MatrixXcd h(m * m, m * m);
    // Coordinate (r,c) is g_rc = g_ji with j=r, i=c; partner (r2,c2) is g_lk.
    for (int r = 1; r < n; ++r) {
        for (int c = 1; c < n; ++c) {
            const int a = (r - 1) * m + (c - 1);
            for (int r2 = 1; r2 < n; ++r2) {
                for (int c2 = 1; c2 < n; ++c2) {
                    const int b = (r2 - 1) * m + (c2 - 1);
                    Complex v = ghat(c, r2) * ghat(c2, r);
                    if (a == b) v -= w(c, r) / (g(r, c) * g(r, c));
                    h(a, b) = v;
                }
            }
        }
    }
    return ComplexSquareMatrix(std::move(h));
}

ComplexSquareMatrix hessian_slice(const GaugeSlicePoint& p, const WeightMatrix& w) {
    return hessian_slice(p.embed(), w);
}

}  // namespace unbiased
