#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "unbiased/linalg.hpp"
#include "unbiased/potential.hpp"

namespace unbiased {

struct SolveConfig {
    int starts = 100;
    std::uint64_t seed = 1;
    int max_iterations = 200;
    double residual_tolerance = 1e-11;
    /// Backtracking factor applied to the Newton step on each rejection.
    double step_damping = 0.5;
    /// Relative singular-value threshold for Hessian nullity.
    double nullity_tolerance = 1e-6;
    double cluster_tolerance = 1e-6;
    ModulusRange modulus_range{0.5, 2.0};
    /// Extra starts seeded at the Fourier matrix: the first is exact, the rest
    /// are multiplicatively perturbed by exp(fourier_perturbation * N(0,1)).
    int fourier_starts = 0;
    double fourier_perturbation = 0.1;
    int threads = 1;

    /// Throws PreconditionError on an invalid configuration.
    void validate() const;
};

/// Default multistart budget: 5000 for n >= 6, where families have small basins.
int default_starts(int n);

/// Smallest step factor before backtracking gives up.
inline constexpr double kMinStepFactor = 0x1.0p-20;
/// Slice entries must keep modulus inside [kMinEntryModulus, kMaxEntryModulus].
inline constexpr double kMinEntryModulus = 1e-8;
inline constexpr double kMaxEntryModulus = 1e8;

/// Ordered invariants of a critical point modulo row/column relabeling and
/// the two-sided torus action.
struct CanonicalKey {
    int nullity = 0;
    std::vector<double> values;

    auto operator<=>(const CanonicalKey&) const = default;
    bool operator==(const CanonicalKey&) const = default;
};

struct CriticalPointRecord {
    GaugeSlicePoint slice_point;
    double residual_norm = 0.0;
    Complex potential_power;  // E^n
    SpectrumReport hessian_spectrum;
    int nullity = 0;
    int basin_count = 1;
    CanonicalKey canonical_key;
    int iterations = 0;
};

struct NoConvergence {
    enum class Reason { MaxIterations, StepCollapse, Singular };
    Reason reason;
    double final_residual;
    int iterations;
};

std::string to_string(NoConvergence::Reason reason);

using NewtonOutcome = std::variant<CriticalPointRecord, NoConvergence>;

/// g'_ij = g_ij g_11 / (g_i1 g_1j): first row and column become 1.
GaugeSlicePoint regauge(const ComplexSquareMatrix& g);

/// Damped Newton on the holomorphic critical system in the free slice
/// coordinates. Iterates in u = log g_free, where the system reads
/// g_free * dF/dg_free = 0 and the Jacobian is D H D + diag(G) with
/// H = hessian_slice and D = diag(g_free); both have the same roots and the
/// same nullity at a root. Linear steps are minimum-norm least squares so
/// singular Jacobians on solution families stay usable.
NewtonOutcome newton_solve(const GaugeSlicePoint& start, const WeightMatrix& w, const SolveConfig& cfg);

/// Builds the record (residual, E^n, spectrum, key) for a converged point.
CriticalPointRecord make_record(const GaugeSlicePoint& p, const WeightMatrix& w, const SolveConfig& cfg);

/// Key built from the nullity, E^n (squared for odd n, where a row swap
/// flips the sign of det) and the sorted multiset of all 2x2 cross ratios
/// c = g_ij g_kl / (g_il g_kj) together with 1/c, rounded to cluster_tolerance.
CanonicalKey canonicalize(const CriticalPointRecord& r, double cluster_tolerance);
CanonicalKey canonicalize(const ComplexSquareMatrix& g, int nullity, double cluster_tolerance);

/// Componentwise comparison within tolerance, robust to rounding boundaries.
bool keys_match(const CanonicalKey& a, const CanonicalKey& b, double cluster_tolerance);

struct MultistartResult {
    std::vector<CriticalPointRecord> clusters;  // ordered by canonical_key
    int attempted = 0;
    int converged = 0;  // raw count, equals the sum of basin counts
    int rejected = 0;   // converged in Newton but failed the independent re-check
};

MultistartResult multistart(int n, const WeightMatrix& w, const SolveConfig& cfg);

/// Starting point of multistart index `index` (random starts first, then
/// Fourier-seeded ones).
GaugeSlicePoint multistart_start(int n, const SolveConfig& cfg, int index);

struct NullDirectionEvidence {
    int direction = 0;
    double distance = 0.0;
    double residual = 0.0;
    bool traced = false;
};

struct FamilyReport {
    int nullity = 0;
    int traced_directions = 0;
    std::vector<NullDirectionEvidence> directions;
    /// "isolated", "family" or "unconfirmed degeneracy".
    std::string status;
    /// Largest |orbit form| on pairs of null directions pushed through phi at A = 0.
    double isotropy_max = 0.0;
};

/// Predictor-corrector probe along each Hessian null direction.
FamilyReport family_probe(const CriticalPointRecord& r, const WeightMatrix& w, const SolveConfig& cfg);

/// Largest |g_ji ghat_ij - lambda_ij|.
double unbiased_deviation(const ComplexSquareMatrix& g, const WeightMatrix& w);

}  // namespace unbiased
