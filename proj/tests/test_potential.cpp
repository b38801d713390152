#include <doctest.h>

#include "oracles.hpp"
#include "unbiased/errors.hpp"
#include "unbiased/potential.hpp"

using namespace unbiased;

namespace {

const ComplexSquareMatrix kHadamard{{1.0, 1.0}, {1.0, -1.0}};
const ComplexSquareMatrix kLopsided{{1.0, 1.0}, {1.0, 2.0}};

// Entries with modulus in [0.7, 1.4] and phase in (-1, 1): far from the
// negative real axis so principal logs stay on one branch.
ComplexSquareMatrix near_one(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = std::polar(rng.uniform(0.7, 1.4), rng.uniform(-1.0, 1.0));
    }
    return ComplexSquareMatrix(m);
}

ComplexSquareMatrix random_slice_matrix(int n, std::uint64_t seed) {
    return GaugeSlicePoint(n, [&] {
        const auto m = random_torus_matrix(n, seed);
        std::vector<Complex> free;
        for (int i = 1; i < n; ++i) {
            for (int j = 1; j < n; ++j) free.push_back(m(i, j));
        }
        return free;
    }()).embed();
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("uniform_weights examples") {
    const auto w2 = uniform_weights(2);
    CHECK(w2.k() == 2);
    CHECK(w2.n() == 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(w2(i, j) == Complex(0.5));
    }
    CHECK(uniform_weights(1)(0, 0) == Complex(1.0));
    const auto w3 = uniform_weights(3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(w3.eigen().row(i).sum() - Complex(1.0)) < 1e-15);
    CHECK(validate_weights(w3).valid);
    CHECK_THROWS_AS(uniform_weights(0), PreconditionError);
}

TEST_CASE("validate_weights reports each violation") {
    Eigen::MatrixXcd m(2, 2);
    m << 0.5, 0.5, 0.7, 0.3;
    const auto r = validate_weights(WeightMatrix(2, 2, m));
    CHECK_FALSE(r.valid);
    REQUIRE(r.violations.size() == 2);
    for (const auto& v : r.violations) CHECK(v.kind == WeightViolation::Kind::ColumnSum);
    CHECK(r.violations[0].indices == std::vector<int>{0});
    CHECK(r.violations[0].deviation == doctest::Approx(0.2));
    CHECK(r.violations[1].indices == std::vector<int>{1});

    Eigen::MatrixXcd z(2, 2);
    z << 0.0, 1.0, 1.0, 0.0;
    const auto rz = validate_weights(WeightMatrix(2, 2, z));
    CHECK_FALSE(rz.valid);
    CHECK(rz.violations.size() == 2);
    CHECK(rz.violations[0].kind == WeightViolation::Kind::ZeroEntry);
    CHECK(rz.violations[0].indices == std::vector<int>{0, 0});
    CHECK(to_string(rz.violations[0].kind) == "nonzero");

    Eigen::MatrixXcd row(2, 2);
    row << 0.5, 0.6, 0.5, 0.4;
    const auto rr = validate_weights(WeightMatrix(2, 2, row));
    CHECK(rr.violations.size() == 2);  // row 0 and column 1
    CHECK(rr.violations[0].kind == WeightViolation::Kind::RowSum);
}

TEST_CASE("column orientation is noted, not enforced, when k < n") {
    Eigen::MatrixXcd m(1, 3);
    m << 0.5, 0.25, 0.25;
    const auto r = validate_weights(WeightMatrix(1, 3, m));
    CHECK(r.valid);
    CHECK(r.notes.size() == 3);
    CHECK(validate_weights(uniform_weights(4).top_rows(2)).valid);
    CHECK_THROWS_AS(uniform_weights(3).top_rows(4), PreconditionError);
    CHECK_THROWS_AS(WeightMatrix(2, 3, Eigen::MatrixXcd(2, 2)), PreconditionError);
}

TEST_CASE("grad_F examples") {
    const auto w = uniform_weights(2);
    CHECK(grad_F(kHadamard, w).a.max_abs() < 1e-15);
    const auto a = grad_F(kLopsided, w).a;
    Eigen::MatrixXcd expected(2, 2);
    expected << -1.5, 1.5, 1.5, -0.75;
    CHECK((a.eigen() - expected).cwiseAbs().maxCoeff() < 1e-14);
    for (int n = 1; n <= 8; ++n) CHECK(grad_F(fourier_matrix(n), uniform_weights(n)).a.max_abs() < 1e-12);
}

TEST_CASE("grad_F error paths") {
    const auto w = uniform_weights(2);
    const ComplexSquareMatrix zero_entry{{1.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(grad_F(zero_entry, w), ZeroEntry);
    const ComplexSquareMatrix singular{{1.0, 2.0}, {2.0, 4.0}};
    CHECK_THROWS_AS(grad_F(singular, w), SingularMatrix);
    CHECK_THROWS_AS(grad_F(kHadamard, uniform_weights(3)), PreconditionError);
    try {
        grad_F(zero_entry, w);
    } catch (const ZeroEntry& e) {
        CHECK(e.row() == 0);
        CHECK(e.col() == 1);
    }
}

TEST_CASE("grad_F entries follow the transposed index convention") {
    // a_ij = lambda_ij / g_ji - ghat_ij with an asymmetric weight matrix.
    Eigen::MatrixXcd lam(3, 3);
    lam << 0.2, 0.3, 0.5, 0.5, 0.2, 0.3, 0.3, 0.5, 0.2;
    const WeightMatrix w(3, 3, lam);
    const auto g = near_one(3, 11);
    const Eigen::MatrixXcd gi = g.eigen().inverse();
    const auto a = grad_F(g, w).a;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(std::abs(a(i, j) - (lam(i, j) / g(j, i) - gi(i, j))) < 1e-13);
    }
}

TEST_CASE("grad_F matches finite differences of the potential") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const int n = 2 + static_cast<int>(s % 3);
        const auto g = near_one(n, 500 + s);
        const auto w = uniform_weights(n);
        const auto a = grad_F(g, w).a;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const Complex fd_oracle = oracle::potential_partial(g.eigen(), w.eigen(), r, c, 1e-6);
                // library log_potential along the same coordinate
                Eigen::MatrixXcd plus = g.eigen();
                Eigen::MatrixXcd minus = g.eigen();
                plus(r, c) += 1e-6;
                minus(r, c) -= 1e-6;
                const Complex fd_lib = (log_potential(ComplexSquareMatrix(plus), w) -
                                        log_potential(ComplexSquareMatrix(minus), w)) / 2e-6;
                CHECK(std::abs(a(c, r) - fd_oracle) < 1e-6);
                CHECK(std::abs(a(c, r) - fd_lib) < 1e-6);
            }
        }
    }
}

TEST_CASE("critical_residual examples") {
    const auto w = uniform_weights(2);
    const auto h = critical_residual(kHadamard, w);
    CHECK(h.norm == 0.0);
    CHECK(h.per_equation.size() == 2);
    CHECK(critical_residual(fourier_matrix(3), uniform_weights(3)).norm < 1e-12);
    const auto l = critical_residual(kLopsided, w);
    // equations ordered (i,k) = (0,1), (1,0)
    CHECK(std::abs(l.per_equation[0] - Complex(0.75)) < 1e-15);
    CHECK(l.norm > 0.0);
    const ComplexSquareMatrix zero_entry{{1.0, 1.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(critical_residual(zero_entry, w), ZeroEntry);
}

TEST_CASE("critical residual is gauge covariant") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const int n = 3 + static_cast<int>(s % 2);
        const auto g = random_torus_matrix(n, 70 + s);
        const auto w = uniform_weights(n);
        std::vector<Complex> t, sv;
        SplitMix64 rng(s);
        for (int i = 0; i < n; ++i) {
            t.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 6.0)));
            sv.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 6.0)));
        }
        const auto tg = ComplexSquareMatrix::diagonal(t) * g * ComplexSquareMatrix::diagonal(sv);
        const auto base = critical_residual(g, w).per_equation;
        const auto moved = critical_residual(tg, w).per_equation;
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                if (i == k) continue;
                const Complex scale = t[static_cast<std::size_t>(i)] / t[static_cast<std::size_t>(k)];
                CHECK(std::abs(moved[idx] - scale * base[idx]) < 1e-12 * (1.0 + std::abs(moved[idx])));
                ++idx;
            }
        }
    }
    // zero stays zero under the torus action
    const auto f = fourier_matrix(4);
    const auto scaled = ComplexSquareMatrix::diagonal({2.0, Complex(0, 1), 0.5, 3.0}) * f *
                        ComplexSquareMatrix::diagonal({1.0, 7.0, Complex(1, 1), -2.0});
    CHECK(critical_residual(scaled, uniform_weights(4)).norm < 1e-12);
}

TEST_CASE("critical residual and gradient formulations agree") {
    for (int n = 2; n <= 6; ++n) {
        const auto w = uniform_weights(n);
        const auto slice_f = GaugeSlicePoint(n, [&] {
            std::vector<Complex> v;
            const auto f = fourier_matrix(n);
            for (int i = 1; i < n; ++i) {
                for (int j = 1; j < n; ++j) v.push_back(f(i, j));
            }
            return v;
        }()).embed();
        double grad_norm = 0.0;
        for (const Complex c : free_gradient(slice_f, w)) grad_norm = std::max(grad_norm, std::abs(c));
        CHECK(critical_residual(slice_f, w).norm < 1e-12);
        CHECK(grad_norm < 1e-12);

        const auto g = random_slice_matrix(n, 900 + static_cast<std::uint64_t>(n));
        double rnd_grad = 0.0;
        for (const Complex c : free_gradient(g, w)) rnd_grad = std::max(rnd_grad, std::abs(c));
        CHECK(critical_residual(g, w).norm > 1e-6);
        CHECK(rnd_grad > 1e-6);
    }
}

TEST_CASE("potential_power examples and invariance") {
    CHECK(std::abs(potential_power(kHadamard) - Complex(-4.0)) < 1e-14);
    const ComplexSquareMatrix equal_rows{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {4.0, 5.0, 7.0}};
    CHECK(std::abs(potential_power(equal_rows)) < 1e-12);
    const ComplexSquareMatrix ones{{1.0, 1.0}, {1.0, 1.0}};
    CHECK(std::abs(potential_power(ones)) == 0.0);
    CHECK_THROWS_AS(potential_power(ComplexSquareMatrix{{1.0, 0.0}, {1.0, 1.0}}), ZeroEntry);

    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto g = random_torus_matrix(4, 10 + s);
        const Complex e = potential_power(g);
        CHECK(std::abs(potential_power(g * Complex(0.3, 1.7)) - e) < 1e-10 * std::abs(e));
        const auto moved = ComplexSquareMatrix::diagonal({2.0, Complex(0, 1), 0.5, 3.0}) * g *
                           ComplexSquareMatrix::diagonal({1.0, 7.0, Complex(1, 1), -2.0});
        CHECK(std::abs(potential_power(moved) - e) < 1e-10 * std::abs(e));
        CHECK(std::abs(potential_power(g) - std::pow(oracle::leibniz_det(g.eigen()), 4) / g.eigen().prod()) <
              1e-10 * std::abs(e));
    }
}

TEST_CASE("log_potential examples") {
    const double e = std::exp(1.0);
    const ComplexSquareMatrix g{{1.0, 1.0}, {1.0, e}};
    const Complex expected = 0.5 * (0.0 + 0.0 + 0.0 + 1.0) - std::log(e - 1.0);
    CHECK(std::abs(log_potential(g, uniform_weights(2)) - expected) < 1e-14);

    // unit-circle entries and det on the positive real axis
    const auto f = fourier_matrix(3);
    const Complex d = det(f);
    const auto rotated = f * std::polar(1.0, -std::arg(d) / 3.0);
    const Complex lp = log_potential(rotated, uniform_weights(3));
    CHECK(std::abs(lp.real() + std::log(std::abs(det(rotated)))) < 1e-12);

    const ComplexSquareMatrix ones{{1.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(log_potential(ones, uniform_weights(2)), SingularMatrix);
}

TEST_CASE("GaugeSlicePoint validates and embeds") {
    const GaugeSlicePoint p(3, {2.0, 3.0, 4.0, 5.0});
    const auto g = p.embed();
    CHECK(g(0, 0) == Complex(1.0));
    CHECK(g(0, 2) == Complex(1.0));
    CHECK(g(2, 0) == Complex(1.0));
    CHECK(g(1, 1) == Complex(2.0));
    CHECK(g(2, 2) == Complex(5.0));
    CHECK_THROWS_AS(GaugeSlicePoint(3, {1.0, 2.0}), PreconditionError);
    CHECK_THROWS_AS(GaugeSlicePoint(2, {0.0}), ZeroEntry);
    CHECK_THROWS_AS(GaugeSlicePoint(2, {Complex(NAN, 0)}), PreconditionError);
}

TEST_CASE("hessian_slice examples") {
    const GaugeSlicePoint x(2, {-1.0});
    const auto h = hessian_slice(x, uniform_weights(2));
    REQUIRE(h.n() == 1);
    CHECK(std::abs(h(0, 0) - Complex(-0.25)) < 1e-15);
    // univariate oracle F''(x) = -1/(2 x^2) + 1/(x - 1)^2 at another point
    const Complex x0(0.3, 0.8);
    const auto h2 = hessian_slice(GaugeSlicePoint(2, {x0}), uniform_weights(2));
    CHECK(std::abs(h2(0, 0) - (-0.5 / (x0 * x0) + 1.0 / ((x0 - 1.0) * (x0 - 1.0)))) < 1e-14);
    CHECK_THROWS_AS(hessian_slice(ComplexSquareMatrix::identity(1), uniform_weights(1)), PreconditionError);
}

TEST_CASE("hessian_slice is symmetric and matches the Jacobian of the gradient") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const int n = 2 + static_cast<int>(s % 4);
        const auto g = random_slice_matrix(n, 300 + s);
        const auto w = uniform_weights(n);
        const auto h = hessian_slice(g, w).eigen();
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()));
        const auto jac = oracle::gradient_jacobian(g.eigen(), w.eigen(), 1e-6);
        CHECK((h - jac).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, h.cwiseAbs().maxCoeff()));
    }
    // at the Fourier slice point for n = 3
    const auto f = fourier_matrix(3);
    const auto h = hessian_slice(f, uniform_weights(3)).eigen();
    CHECK((h - oracle::gradient_jacobian(f.eigen(), uniform_weights(3).eigen(), 1e-6)).cwiseAbs().maxCoeff() < 1e-6);
}

}  // TEST_SUITE
