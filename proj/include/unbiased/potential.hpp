#pragma once

#include <string>
#include <vector>

#include "unbiased/linalg.hpp"

namespace unbiased {

/// Unbiasedness targets lambda_ij = Tr(p_i q_j) for a k-row by n-column
/// bipartite graph. Construction does not validate; use validate_weights().
class WeightMatrix {
public:
    WeightMatrix(int k, int n, Eigen::MatrixXcd entries);

    int k() const noexcept { return k_; }
    int n() const noexcept { return n_; }
    Complex operator()(int i, int j) const { return w_(i, j); }
    const Eigen::MatrixXcd& eigen() const noexcept { return w_; }

    /// First `rows` rows as a new weight matrix.
    WeightMatrix top_rows(int rows) const;

private:
    int k_;
    int n_;
    Eigen::MatrixXcd w_;
};

WeightMatrix uniform_weights(int n);

struct WeightViolation {
    enum class Kind { ZeroEntry, RowSum, ColumnSum };
    Kind kind;
    std::vector<int> indices;  // 0-based
    double deviation;
};

std::string to_string(WeightViolation::Kind kind);

struct WeightReport {
    bool valid = true;
    std::vector<WeightViolation> violations;
    /// For k < n the column-sum orientation is reported here, never enforced.
    std::vector<WeightViolation> notes;
};

/// Tolerance for the sum constraints.
inline constexpr double kWeightSumTolerance = 1e-12;

WeightReport validate_weights(const WeightMatrix& w);

/// Point of the gauge slice: first row and column of g fixed to 1, the
/// (n-1)^2 entries g_ij with i,j >= 1 (0-based) stored row-major.
class GaugeSlicePoint {
public:
    GaugeSlicePoint(int n, std::vector<Complex> free_entries);

    int n() const noexcept { return n_; }
    const std::vector<Complex>& free_entries() const noexcept { return free_; }
    ComplexSquareMatrix embed() const;

private:
    int n_;
    std::vector<Complex> free_;
};

/// a_ij = dF/dg_ji. Note the transposition between (ij) and (ji).
struct GradientMatrix {
    ComplexSquareMatrix a;
};

/// a_ij = lambda_ij / g_ji - ghat_ij, ghat = g^{-1}.
///
/// (ij)<->(ji): row i of A pairs with column i of g. With p_i = g q_i g^{-1},
/// Tr(p_i q_j) = g_ji ghat_ij, so a_ij = 0 exactly when Tr(p_i q_j) = lambda_ij.
GradientMatrix grad_F(const ComplexSquareMatrix& g, const WeightMatrix& w);

struct CriticalResidual {
    double norm = 0.0;
    /// Value of sum_j lambda_jk g_ij / g_kj for every ordered pair i != k,
    /// i outer, k inner.
    std::vector<Complex> per_equation;
};

CriticalResidual critical_residual(const ComplexSquareMatrix& g, const WeightMatrix& w);

/// E^n = det(g)^n / prod_ij g_ij for uniform weights.
Complex potential_power(const ComplexSquareMatrix& g);

/// sum_ij lambda_ij log(g_ji) - log det g with principal branches. Reporting
/// only: the value depends on the branch and criticality never uses it.
Complex log_potential(const ComplexSquareMatrix& g, const WeightMatrix& w);

/// dF/dg over the free slice coordinates, enumerated row-major over g_rc with
/// r,c >= 1. Component (r,c) equals a_cr.
std::vector<Complex> free_gradient(const ComplexSquareMatrix& g, const WeightMatrix& w);

/// Complex Hessian of F in the free slice coordinates:
/// d2F / dg_ji dg_lk = -lambda_ij delta_{(ji),(lk)} / g_ji^2 + ghat_il ghat_kj.
ComplexSquareMatrix hessian_slice(const GaugeSlicePoint& p, const WeightMatrix& w);
ComplexSquareMatrix hessian_slice(const ComplexSquareMatrix& g, const WeightMatrix& w);

/// Throws ZeroEntry when any entry of g is exactly zero.
void require_nonzero_entries(const ComplexSquareMatrix& g);

}  // namespace unbiased
