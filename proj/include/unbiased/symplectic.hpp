#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "unbiased/linalg.hpp"
#include "unbiased/verify.hpp"

namespace unbiased {

/// Point (g, A) of the zero fiber diag(A g) = 0 of the torus moment map.
class CotangentPoint {
public:
    /// Throws PreconditionError when g is singular or diag(A g) does not vanish.
    CotangentPoint(ComplexSquareMatrix g, ComplexSquareMatrix A);

    const ComplexSquareMatrix& g() const noexcept { return g_; }
    const ComplexSquareMatrix& A() const noexcept { return A_; }
    const ComplexSquareMatrix& g_inverse() const noexcept { return g_inv_; }
    int n() const noexcept { return g_.n(); }

private:
    ComplexSquareMatrix g_;
    ComplexSquareMatrix A_;
    ComplexSquareMatrix g_inv_;
};

/// Tangent vector (dg, dA) at a cotangent point.
struct TangentPair {
    ComplexSquareMatrix dg;
    ComplexSquareMatrix dA;
};

inline constexpr double kConstraintTolerance = 1e-12;
/// phi is rejected when cond(1 + gA) exceeds this.
inline constexpr double kMaxEmbeddingCondition = 1e12;
inline constexpr double kMinSampleDiagonal = 0.5;

/// diag(A g).
std::vector<Complex> torus_moment(const ComplexSquareMatrix& g, const ComplexSquareMatrix& A);

/// Returns A + D with D diagonal so that diag((A + D) g) = 0. Needs g_ii != 0.
ComplexSquareMatrix project_to_constraint(const ComplexSquareMatrix& g, const ComplexSquareMatrix& A);

/// Corrects dA by a diagonal matrix so diag(dA g + A dg) = 0 at the base point.
TangentPair project_tangent(const CotangentPoint& pt, ComplexSquareMatrix dg, ComplexSquareMatrix dA);

/// sum p_i - P.
ComplexSquareMatrix moment_sum(std::span<const ComplexSquareMatrix> ps, const ComplexSquareMatrix& P);

struct LemmaSides {
    bool sum_is_projector = false;
    bool pairwise_orthogonal = false;
};

/// Both sides of: a sum of k rank-1 projectors is a rank-k projector iff they
/// are pairwise orthogonal. Each side is evaluated independently.
LemmaSides rank_k_lemma_check(std::span<const ComplexSquareMatrix> ps, double tol);

struct LemmaBatteryReport {
    int instances = 0;
    int orthogonal_instances = 0;
    int counterexamples = 0;
};

/// Seeded random k-tuples of rank-1 idempotents cycling through three kinds:
/// columns of a conjugated coordinate system (orthogonal), independent random
/// idempotents, and an orthogonal tuple with one member replaced. Counts the
/// instances where the two sides of rank_k_lemma_check disagree.
LemmaBatteryReport rank_k_lemma_battery(int n, int k, int instances, std::uint64_t seed, double tol);

/// r_i = g q_i g^{-1} (1 + g A).
std::vector<ComplexSquareMatrix> phi_embed(const CotangentPoint& pt);

/// Exact directional derivative of phi_embed along t.
std::vector<ComplexSquareMatrix> phi_differential(const CotangentPoint& pt, const TangentPair& t);

/// Tr(dA1 dg2) - Tr(dA2 dg1).
Complex omega_X(const TangentPair& t1, const TangentPair& t2);

/// sum_i Tr(r_i d1r_i d2r_i) - Tr(r_i d2r_i d1r_i).
Complex omega_Y(std::span<const ComplexSquareMatrix> rs, std::span<const ComplexSquareMatrix> drs1,
                std::span<const ComplexSquareMatrix> drs2);

struct DeviationReport {
    double max_deviation = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    bool passed = true;  // max_deviation < tolerance
};

/// Random constraint-tangent pairs at pt; compares omega_X with the orbit form
/// on the pushed-forward tangents.
DeviationReport pullback_symplectic_check(const CotangentPoint& pt, int trials, std::uint64_t seed, double tol);

/// Random point with cond(g) and cond(1 + gA) at most max_condition and
/// |g_ii| >= kMinSampleDiagonal, since both constraint projections divide by g_ii.
CotangentPoint random_cotangent_point(int n, std::uint64_t seed, double max_condition = 20.0);

/// Random tangent satisfying the linearized constraint.
TangentPair random_tangent(const CotangentPoint& pt, SplitMix64& rng);

/// Tr(p [M, N]).
Complex kks_bracket(const ComplexSquareMatrix& p, const ComplexSquareMatrix& M, const ComplexSquareMatrix& N);

/// Brackets {Tr(p M_a), Tr(p M_b)} for all observable pairs at every sample;
/// each nonzero bracket is a violation.
CheckReport commute_check(std::span<const ComplexSquareMatrix> p_samples,
                          std::span<const ComplexSquareMatrix> observables);

/// commute_check with the coordinate projectors as observables. Functions on
/// different factors of the product of orbits commute identically and are not
/// evaluated.
CheckReport integrable_commute_check(std::span<const ComplexSquareMatrix> p_samples);
/// Same check on `trials` random rank-1 idempotents in dimension n.
CheckReport integrable_commute_check(int n, int trials, std::uint64_t seed);

/// Random rank-1 idempotent u v^T / (v^T u).
ComplexSquareMatrix random_rank_one_idempotent(int n, SplitMix64& rng);

}  // namespace unbiased
