#include "unbiased/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unbiased/errors.hpp"

namespace unbiased {

namespace {

double condition_number(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

ComplexSquareMatrix random_complex_matrix(int n, SplitMix64& rng) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    }
    return ComplexSquareMatrix(std::move(m));
}

}  // namespace

CotangentPoint::CotangentPoint(ComplexSquareMatrix g, ComplexSquareMatrix A)
    : g_(std::move(g)), A_(std::move(A)), g_inv_(invert(g_)) {
    if (g_.n() != A_.n()) throw PreconditionError("g and A must share a dimension");
    const double scale = std::max(1.0, A_.max_abs() * g_.max_abs() * g_.n());
    for (const Complex d : torus_moment(g_, A_)) {
        if (std::abs(d) > kConstraintTolerance * scale) {
            throw PreconditionError("cotangent point violates diag(A g) = 0");
        }
    }
}

std::vector<Complex> torus_moment(const ComplexSquareMatrix& g, const ComplexSquareMatrix& A) {
    const Eigen::MatrixXcd ag = A.eigen() * g.eigen();
    std::vector<Complex> d(static_cast<std::size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i) d[static_cast<std::size_t>(i)] = ag(i, i);
    return d;
}

ComplexSquareMatrix project_to_constraint(const ComplexSquareMatrix& g, const ComplexSquareMatrix& A) {
    Eigen::MatrixXcd a = A.eigen();
    const auto d = torus_moment(g, A);
    for (int i = 0; i < g.n(); ++i) {
        if (g(i, i) == Complex(0.0)) throw PreconditionError("constraint projection needs g_ii != 0");
        a(i, i) -= d[static_cast<std::size_t>(i)] / g(i, i);
    }
    return ComplexSquareMatrix(std::move(a));
}

TangentPair project_tangent(const CotangentPoint& pt, ComplexSquareMatrix dg, ComplexSquareMatrix dA) {
    const auto& g = pt.g();
    const Eigen::MatrixXcd lin = dA.eigen() * g.eigen() + pt.A().eigen() * dg.eigen();
    Eigen::MatrixXcd corrected = dA.eigen();
    for (int i = 0; i < g.n(); ++i) {
        if (g(i, i) == Complex(0.0)) throw PreconditionError("tangent projection needs g_ii != 0");
        corrected(i, i) -= lin(i, i) / g(i, i);
    }
    return {std::move(dg), ComplexSquareMatrix(std::move(corrected))};
}

ComplexSquareMatrix moment_sum(std::span<const ComplexSquareMatrix> ps, const ComplexSquareMatrix& P) {
    Eigen::MatrixXcd s = -P.eigen();
    for (const auto& p : ps) {
        if (p.n() != P.n()) throw PreconditionError("moment_sum dimension mismatch");
        s += p.eigen();
    }
    return ComplexSquareMatrix(std::move(s));
}

LemmaSides rank_k_lemma_check(std::span<const ComplexSquareMatrix> ps, double tol) {
    LemmaSides sides;
    if (ps.empty()) return {true, true};
    const int n = ps.front().n();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& p : ps) sum += p.eigen();
    const ComplexSquareMatrix s(std::move(sum));
    const double snorm = s.operator_norm();
    const double idem = (s * s - s).operator_norm() / std::max(1.0, snorm * snorm);
    sides.sum_is_projector = idem <= tol && numeric_rank(s, tol) == static_cast<int>(ps.size());

    sides.pairwise_orthogonal = true;
    for (std::size_t a = 0; a < ps.size() && sides.pairwise_orthogonal; ++a) {
        for (std::size_t b = 0; b < ps.size(); ++b) {
            if (a == b) continue;
            const double scale = std::max(1.0, ps[a].operator_norm() * ps[b].operator_norm());
            if ((ps[a] * ps[b]).operator_norm() / scale > tol) {
                sides.pairwise_orthogonal = false;
                break;
            }
        }
    }
    return sides;
}

LemmaBatteryReport rank_k_lemma_battery(int n, int k, int instances, std::uint64_t seed, double tol) {
    if (k < 1 || k > n) throw PreconditionError("lemma battery needs 1 <= k <= n");
    if (instances < 1) throw PreconditionError("instances must be positive");
    LemmaBatteryReport report;
    report.instances = instances;
    for (int t = 0; t < instances; ++t) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<ComplexSquareMatrix> ps;
        if (t % 3 == 1) {
            for (int i = 0; i < k; ++i) ps.push_back(random_rank_one_idempotent(n, rng));
        } else {
            Eigen::MatrixXcd g;
            do {
                g = random_complex_matrix(n, rng).eigen() + 2.0 * Eigen::MatrixXcd::Identity(n, n);
            } while (condition_number(g) > 1e3);
            const Eigen::MatrixXcd gi = g.inverse();
            for (int i = 0; i < k; ++i) ps.emplace_back(Eigen::MatrixXcd(g.col(i) * gi.row(i)));
            if (t % 3 == 2) ps.back() = random_rank_one_idempotent(n, rng);
        }
        const LemmaSides sides = rank_k_lemma_check(ps, tol);
        report.orthogonal_instances += sides.pairwise_orthogonal;
        report.counterexamples += sides.sum_is_projector != sides.pairwise_orthogonal;
    }
    return report;
}

std::vector<ComplexSquareMatrix> phi_embed(const CotangentPoint& pt) {
    const int n = pt.n();
    const Eigen::MatrixXcd twist = Eigen::MatrixXcd::Identity(n, n) + pt.g().eigen() * pt.A().eigen();
    if (condition_number(twist) > kMaxEmbeddingCondition) {
        throw PreconditionError("1 + gA is too ill-conditioned for the embedding");
    }
    std::vector<ComplexSquareMatrix> rs;
    rs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd p = pt.g().eigen().col(i) * pt.g_inverse().eigen().row(i);
        rs.emplace_back(Eigen::MatrixXcd(p * twist));
    }
    return rs;
}

std::vector<ComplexSquareMatrix> phi_differential(const CotangentPoint& pt, const TangentPair& t) {
    const int n = pt.n();
    const Eigen::MatrixXcd& g = pt.g().eigen();
    const Eigen::MatrixXcd& gi = pt.g_inverse().eigen();
    const Eigen::MatrixXcd& A = pt.A().eigen();
    const Eigen::MatrixXcd& dg = t.dg.eigen();
    const Eigen::MatrixXcd& dA = t.dA.eigen();
    const Eigen::MatrixXcd twist = Eigen::MatrixXcd::Identity(n, n) + g * A;
    const Eigen::MatrixXcd dtwist = dg * A + g * dA;
    const Eigen::MatrixXcd dgi = -gi * dg * gi;
    std::vector<ComplexSquareMatrix> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd p = g.col(i) * gi.row(i);
        const Eigen::MatrixXcd dp = dg.col(i) * gi.row(i) + g.col(i) * dgi.row(i);
        out.emplace_back(Eigen::MatrixXcd(dp * twist + p * dtwist));
    }
    return out;
}

Complex omega_X(const TangentPair& t1, const TangentPair& t2) {
    return (t1.dA.eigen() * t2.dg.eigen()).trace() - (t2.dA.eigen() * t1.dg.eigen()).trace();
}

Complex omega_Y(std::span<const ComplexSquareMatrix> rs, std::span<const ComplexSquareMatrix> drs1,
                std::span<const ComplexSquareMatrix> drs2) {
    if (rs.size() != drs1.size() || rs.size() != drs2.size()) {
        throw PreconditionError("omega_Y needs lists of equal length");
    }
    Complex total = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i].eigen();
        const auto& a = drs1[i].eigen();
        const auto& b = drs2[i].eigen();
        total += (r * a * b).trace() - (r * b * a).trace();
    }
    return total;
}

TangentPair random_tangent(const CotangentPoint& pt, SplitMix64& rng) {
    const int n = pt.n();
    ComplexSquareMatrix dg = random_complex_matrix(n, rng);
    ComplexSquareMatrix dA = random_complex_matrix(n, rng);
    return project_tangent(pt, std::move(dg), std::move(dA));
}

DeviationReport pullback_symplectic_check(const CotangentPoint& pt, int trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw PreconditionError("trials must be positive");
    SplitMix64 rng(seed);
    const auto rs = phi_embed(pt);
    DeviationReport report;
    report.trials = trials;
    report.seed = seed;
    for (int t = 0; t < trials; ++t) {
        const TangentPair t1 = random_tangent(pt, rng);
        const TangentPair t2 = random_tangent(pt, rng);
        const Complex wx = omega_X(t1, t2);
        const Complex wy = omega_Y(rs, phi_differential(pt, t1), phi_differential(pt, t2));
        report.max_deviation = std::max(report.max_deviation, std::abs(wx - wy));
    }
    report.passed = report.max_deviation < tol;
    return report;
}

CotangentPoint random_cotangent_point(int n, std::uint64_t seed, double max_condition) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        SplitMix64 rng(derive_seed(seed, attempt));
        Eigen::MatrixXcd g = random_complex_matrix(n, rng).eigen() + 2.0 * Eigen::MatrixXcd::Identity(n, n);
        if (condition_number(g) > max_condition) continue;
        if (g.diagonal().cwiseAbs().minCoeff() < kMinSampleDiagonal) continue;
        const ComplexSquareMatrix gm(std::move(g));
        const ComplexSquareMatrix A = project_to_constraint(gm, random_complex_matrix(n, rng) * Complex(0.5));
        const Eigen::MatrixXcd twist = Eigen::MatrixXcd::Identity(n, n) + gm.eigen() * A.eigen();
        if (condition_number(twist) > max_condition) continue;
        return CotangentPoint(gm, A);
    }
}

Complex kks_bracket(const ComplexSquareMatrix& p, const ComplexSquareMatrix& M, const ComplexSquareMatrix& N) {
    return (p.eigen() * (M.eigen() * N.eigen() - N.eigen() * M.eigen())).trace();
}

CheckReport commute_check(std::span<const ComplexSquareMatrix> p_samples,
                          std::span<const ComplexSquareMatrix> observables) {
    CheckReport report;
    for (std::size_t s = 0; s < p_samples.size(); ++s) {
        for (std::size_t a = 0; a < observables.size(); ++a) {
            for (std::size_t b = a + 1; b < observables.size(); ++b) {
                const Complex v = kks_bracket(p_samples[s], observables[a], observables[b]);
                if (v != Complex(0.0)) {
                    report.add("kks_bracket", {static_cast<int>(s), static_cast<int>(a), static_cast<int>(b)},
                               std::abs(v));
                }
            }
        }
    }
    return report;
}

CheckReport integrable_commute_check(std::span<const ComplexSquareMatrix> p_samples) {
    if (p_samples.empty()) return {};
    const auto qs = coordinate_projectors(p_samples.front().n());
    return commute_check(p_samples, qs);
}

CheckReport integrable_commute_check(int n, int trials, std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("trials must be positive");
    SplitMix64 rng(seed);
    std::vector<ComplexSquareMatrix> samples;
    samples.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) samples.push_back(random_rank_one_idempotent(n, rng));
    return integrable_commute_check(samples);
}

ComplexSquareMatrix random_rank_one_idempotent(int n, SplitMix64& rng) {
    for (;;) {
        Eigen::VectorXcd u(n), v(n);
        for (int i = 0; i < n; ++i) {
            u(i) = Complex(rng.normal(), rng.normal());
            v(i) = Complex(rng.normal(), rng.normal());
        }
        const Complex pairing = v.transpose() * u;
        if (std::abs(pairing) < 0.1 * u.norm() * v.norm()) continue;
        return ComplexSquareMatrix(Eigen::MatrixXcd(u * v.transpose() / pairing));
    }
}

}  // namespace unbiased
