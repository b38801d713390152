#include <doctest.h>

#include "oracles.hpp"
#include "unbiased/errors.hpp"
#include "unbiased/symplectic.hpp"

using namespace unbiased;

namespace {

using Mat = Eigen::MatrixXcd;

const ComplexSquareMatrix kE11 = ComplexSquareMatrix::unit(2, 0, 0);
const ComplexSquareMatrix kE12 = ComplexSquareMatrix::unit(2, 0, 1);
const ComplexSquareMatrix kE21 = ComplexSquareMatrix::unit(2, 1, 0);

// r_i = g e_ii g^{-1} (1 + g A) with Eigen's inverse.
std::vector<Mat> phi_oracle(const Mat& g, const Mat& A) {
    const int n = static_cast<int>(g.rows());
    const Mat gi = g.inverse();
    std::vector<Mat> out;
    for (int i = 0; i < n; ++i) {
        Mat q = Mat::Zero(n, n);
        q(i, i) = 1.0;
        out.push_back(g * q * gi * (Mat::Identity(n, n) + g * A));
    }
    return out;
}

double max_entry(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("symplectic") {

TEST_CASE("moment_sum examples") {
    const auto q = coordinate_projectors(3);
    CHECK(moment_sum(q, ComplexSquareMatrix::identity(3)).max_abs() == 0.0);
    const std::vector<ComplexSquareMatrix> one{kE11};
    CHECK(moment_sum(one, kE11).max_abs() == 0.0);
    const std::vector<ComplexSquareMatrix> two{kE11, ComplexSquareMatrix{{1.0, 1.0}, {0.0, 0.0}}};
    Mat expected(2, 2);
    expected << 1.0, 1.0, 0.0, -1.0;
    CHECK(max_entry(moment_sum(two, ComplexSquareMatrix::identity(2)).eigen() - expected) == 0.0);
    CHECK_THROWS_AS(moment_sum(two, ComplexSquareMatrix::identity(3)), PreconditionError);
}

TEST_CASE("rank_k_lemma_check examples") {
    const std::vector<ComplexSquareMatrix> diag{ComplexSquareMatrix::diagonal({1.0, 0.0, 0.0}),
                                                ComplexSquareMatrix::diagonal({0.0, 1.0, 0.0})};
    auto s = rank_k_lemma_check(diag, 1e-8);
    CHECK(s.sum_is_projector);
    CHECK(s.pairwise_orthogonal);

    const std::vector<ComplexSquareMatrix> skew{kE11, ComplexSquareMatrix{{1.0, 1.0}, {0.0, 0.0}}};
    s = rank_k_lemma_check(skew, 1e-8);
    CHECK_FALSE(s.sum_is_projector);
    CHECK_FALSE(s.pairwise_orthogonal);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SplitMix64 rng(seed);
        const auto p = random_rank_one_idempotent(2, rng);
        const std::vector<ComplexSquareMatrix> pair{p, ComplexSquareMatrix::identity(2) - p};
        s = rank_k_lemma_check(pair, 1e-8);
        CHECK(s.sum_is_projector);
        CHECK(s.pairwise_orthogonal);
    }
}

TEST_CASE("rank-k lemma holds both ways over 1000+ seeded tuples") {
    int instances = 0, orthogonal = 0, counterexamples = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            const auto r = rank_k_lemma_battery(n, k, 60, derive_seed(42, static_cast<std::uint64_t>(10 * n + k)), 1e-8);
            instances += r.instances;
            orthogonal += r.orthogonal_instances;
            counterexamples += r.counterexamples;
        }
    }
    CHECK(instances >= 1000);
    CHECK(counterexamples == 0);
    CHECK(orthogonal > 0);
    CHECK(orthogonal < instances);
    CHECK_THROWS_AS(rank_k_lemma_battery(3, 4, 10, 1, 1e-8), PreconditionError);
}

TEST_CASE("CotangentPoint enforces the torus constraint") {
    const auto g = ComplexSquareMatrix::identity(2);
    CHECK_NOTHROW(CotangentPoint(g, ComplexSquareMatrix{{0.0, 3.0}, {4.0, 0.0}}));
    CHECK_THROWS_AS(CotangentPoint(g, ComplexSquareMatrix{{1.0, 0.0}, {0.0, 0.0}}), PreconditionError);
    CHECK_THROWS_AS(CotangentPoint(ComplexSquareMatrix{{1.0, 1.0}, {1.0, 1.0}}, ComplexSquareMatrix(2)),
                    SingularMatrix);
    CHECK_THROWS_AS(CotangentPoint(g, ComplexSquareMatrix(3)), PreconditionError);

    const auto gr = random_torus_matrix(4, 5);
    const auto A = project_to_constraint(gr, random_torus_matrix(4, 6));
    for (const Complex d : torus_moment(gr, A)) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("random points and tangents satisfy their constraints") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const int n = 2 + static_cast<int>(s % 4);
        const auto pt = random_cotangent_point(n, s);
        CHECK(singular_spectrum(pt.g(), 1e-12).values.front() / singular_spectrum(pt.g(), 1e-12).values.back() <= 20.0);
        for (const Complex d : torus_moment(pt.g(), pt.A())) CHECK(std::abs(d) < 1e-12);
        SplitMix64 rng(s);
        const auto t = random_tangent(pt, rng);
        const Mat lin = t.dA.eigen() * pt.g().eigen() + pt.A().eigen() * t.dg.eigen();
        CHECK(lin.diagonal().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("phi_embed examples") {
    const auto g = random_torus_matrix(3, 1);
    const auto zero = phi_embed(CotangentPoint(g, ComplexSquareMatrix(3)));
    const auto ps = projectors_from_transition(g);
    for (int i = 0; i < 3; ++i) CHECK((zero[static_cast<std::size_t>(i)] - ps.members[static_cast<std::size_t>(i)]).max_abs() < 1e-14);

    for (const double a : {0.0, 1.0, -3.5, 100.0}) {
        const auto rs = phi_embed(CotangentPoint(ComplexSquareMatrix::identity(2), ComplexSquareMatrix{{0.0, a}, {2.0, 0.0}}));
        Mat expected(2, 2);
        expected << 1.0, a, 0.0, 0.0;
        CHECK(max_entry(rs[0].eigen() - expected) == 0.0);
        CHECK(max_entry(rs[0].eigen() * rs[0].eigen() - rs[0].eigen()) == 0.0);
    }
}

TEST_CASE("phi_embed is idempotent rank one and matches the oracle") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int n = 2 + static_cast<int>(s % 4);
        const auto pt = random_cotangent_point(n, 100 + s, 1e3);
        const auto rs = phi_embed(pt);
        const auto ref = phi_oracle(pt.g().eigen(), pt.A().eigen());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const Mat& r = rs[i].eigen();
            CHECK(max_entry(r * r - r) < 1e-10);
            CHECK(numeric_rank(rs[i], 1e-10) == 1);
            CHECK(max_entry(r - ref[i]) < 1e-10 * std::max(1.0, max_entry(r)));
        }
    }
}

TEST_CASE("phi is invariant under the torus action (g t^-1, t A)") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const int n = 2 + static_cast<int>(s % 4);
        const auto pt = random_cotangent_point(n, 300 + s);
        SplitMix64 rng(s);
        std::vector<Complex> t, ti;
        for (int i = 0; i < n; ++i) {
            t.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 6.0)));
            ti.push_back(1.0 / t.back());
        }
        const CotangentPoint moved(pt.g() * ComplexSquareMatrix::diagonal(ti), ComplexSquareMatrix::diagonal(t) * pt.A());
        const auto a = phi_embed(pt);
        const auto b = phi_embed(moved);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).max_abs() < 1e-10);
    }
}

TEST_CASE("phi_differential examples") {
    const CotangentPoint id(ComplexSquareMatrix::identity(2), ComplexSquareMatrix(2));
    const auto zero = phi_differential(id, {ComplexSquareMatrix(2), ComplexSquareMatrix(2)});
    for (const auto& d : zero) CHECK(d.max_abs() == 0.0);

    // d(g q_i g^-1) at g = 1 along E_12 is [E_12, q_i]: -E_12 for i = 1, +E_12 for i = 2
    const auto d = phi_differential(id, {kE12, ComplexSquareMatrix(2)});
    CHECK((d[0] + kE12).max_abs() == 0.0);
    CHECK((d[1] - kE12).max_abs() == 0.0);
}

TEST_CASE("phi_differential matches finite differences of phi") {
    const double h = 1e-6;
    for (std::uint64_t s = 0; s < 15; ++s) {
        const int n = 2 + static_cast<int>(s % 4);
        const auto pt = random_cotangent_point(n, 500 + s);
        SplitMix64 rng(s);
        const auto t = random_tangent(pt, rng);
        const auto exact = phi_differential(pt, t);
        const auto plus = phi_oracle(pt.g().eigen() + h * t.dg.eigen(), pt.A().eigen() + h * t.dA.eigen());
        const auto minus = phi_oracle(pt.g().eigen() - h * t.dg.eigen(), pt.A().eigen() - h * t.dA.eigen());
        for (std::size_t i = 0; i < exact.size(); ++i) {
            const Mat fd = (plus[i] - minus[i]) / (2.0 * h);
            CHECK(max_entry(exact[i].eigen() - fd) < 1e-6 * std::max(1.0, max_entry(fd)));
        }
    }
}

TEST_CASE("omega_X examples") {
    const TangentPair a{ComplexSquareMatrix(2), kE12};
    const TangentPair b{kE21, ComplexSquareMatrix(2)};
    CHECK(omega_X(a, b) == Complex(1.0));
    CHECK(omega_X(b, a) == Complex(-1.0));
    CHECK(omega_X(a, a) == Complex(0.0));
    const auto pt = random_cotangent_point(3, 9);
    SplitMix64 rng(9);
    const auto t1 = random_tangent(pt, rng);
    const auto t2 = random_tangent(pt, rng);
    CHECK(std::abs(omega_X(t1, t2) + omega_X(t2, t1)) < 1e-14);
    CHECK(std::abs(omega_X(t1, t1)) < 1e-14);
}

TEST_CASE("omega_Y examples") {
    const std::vector<ComplexSquareMatrix> r{kE11};
    const std::vector<ComplexSquareMatrix> d1{kE12};
    const std::vector<ComplexSquareMatrix> d2{kE21};
    CHECK(omega_Y(r, d1, d2) == Complex(1.0));
    CHECK(omega_Y(r, d2, d1) == Complex(-1.0));
    CHECK(omega_Y(r, d1, d1) == Complex(0.0));
    const std::vector<ComplexSquareMatrix> none;
    CHECK_THROWS_AS(omega_Y(r, d1, none), PreconditionError);
}

TEST_CASE("pullback examples") {
    const CotangentPoint id(ComplexSquareMatrix::identity(3), ComplexSquareMatrix(3));
    CHECK(pullback_symplectic_check(id, 50, 1, 1e-10).max_deviation < 1e-10);
    const auto r = pullback_symplectic_check(random_cotangent_point(3, 2), 100, 3, 1e-8);
    CHECK(r.passed);
    CHECK(r.trials == 100);
    CHECK(r.seed == 3);
    CHECK_THROWS_AS(pullback_symplectic_check(id, 0, 1, 1e-8), PreconditionError);
}

TEST_CASE("phi pulls the orbit form back to the cotangent form") {
    for (int n = 2; n <= 4; ++n) {
        double worst = 0.0;
        for (std::uint64_t p = 0; p < 20; ++p) {
            const auto pt = random_cotangent_point(n, derive_seed(7, p));
            worst = std::max(worst, pullback_symplectic_check(pt, 100, derive_seed(8, p), 1e-8).max_deviation);
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("kks_bracket examples") {
    SplitMix64 rng(4);
    const auto p = random_rank_one_idempotent(3, rng);
    CHECK(kks_bracket(p, ComplexSquareMatrix::diagonal({1.0, 2.0, 3.0}), ComplexSquareMatrix::diagonal({5.0, Complex(0, 1), 7.0})) ==
          Complex(0.0));
    CHECK(kks_bracket(ComplexSquareMatrix::diagonal({1.0, 0.0}), kE12, kE21) == Complex(1.0));
    CHECK(kks_bracket(p, p, p) == Complex(0.0));
}

TEST_CASE("coordinate observables Poisson commute") {
    const auto r = integrable_commute_check(3, 50, 1);
    CHECK(r.passed);
    CHECK(integrable_commute_check(std::vector<ComplexSquareMatrix>{}).passed);

    SplitMix64 rng(2);
    std::vector<ComplexSquareMatrix> samples;
    for (int i = 0; i < 10; ++i) samples.push_back(random_rank_one_idempotent(3, rng));
    auto obs = coordinate_projectors(3);
    obs[1] = ComplexSquareMatrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    const auto bad = commute_check(samples, obs);
    CHECK_FALSE(bad.passed);
    CHECK(bad.violations.size() >= 10);
    CHECK_THROWS_AS(integrable_commute_check(3, 0, 1), PreconditionError);
}

}  // TEST_SUITE
