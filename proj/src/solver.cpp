#include "unbiased/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "unbiased/errors.hpp"
#include "unbiased/symplectic.hpp"

namespace unbiased {

namespace {

// Log-coordinate critical system. u holds log g_rc for the free entries.
struct LogSystem {
    Eigen::VectorXcd G;
    Eigen::MatrixXcd J;
};

ComplexSquareMatrix embed_free(int n, const Eigen::VectorXcd& x) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Ones(n, n);
    for (int r = 1; r < n; ++r) {
        for (int c = 1; c < n; ++c) g(r, c) = x((r - 1) * (n - 1) + (c - 1));
    }
    return ComplexSquareMatrix(std::move(g));
}

bool inside_window(const Eigen::VectorXcd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double m = std::abs(x(i));
        if (!(m >= kMinEntryModulus && m <= kMaxEntryModulus)) return false;
    }
    return true;
}

// G_(r,c) = g_rc dF/dg_rc = lambda_cr - g_rc ghat_cr.
Eigen::VectorXcd log_gradient(const ComplexSquareMatrix& g, const ComplexSquareMatrix& ghat, const WeightMatrix& w) {
    const int n = g.n();
    const int m = n - 1;
    Eigen::VectorXcd G(m * m);
    for (int r = 1; r < n; ++r) {
        for (int c = 1; c < n; ++c) G((r - 1) * m + (c - 1)) = w(c, r) - g(r, c) * ghat(c, r);
    }
    return G;
}

std::optional<LogSystem> evaluate(int n, const Eigen::VectorXcd& x, const WeightMatrix& w, bool with_jacobian) {
    if (!inside_window(x)) return std::nullopt;
    const ComplexSquareMatrix g = embed_free(n, x);
    std::optional<ComplexSquareMatrix> ghat;
    try {
        ghat = invert(g);
    } catch (const SingularMatrix&) {
        return std::nullopt;
    }
    LogSystem sys;
    sys.G = log_gradient(g, *ghat, w);
    if (with_jacobian) {
        const Eigen::MatrixXcd H = hessian_slice(g, w).eigen();
        sys.J = x.asDiagonal() * H * x.asDiagonal();
        sys.J.diagonal() += sys.G;
    }
    return sys;
}

bool accepted(const ComplexSquareMatrix& g, const WeightMatrix& w, double tol) {
    return critical_residual(g, w).norm < tol && unbiased_deviation(g, w) <= 100.0 * tol;
}

struct RefineResult {
    std::optional<Eigen::VectorXcd> x;
    NoConvergence failure{NoConvergence::Reason::MaxIterations, 0.0, 0};
    int iterations = 0;
};

RefineResult refine(int n, Eigen::VectorXcd x, const WeightMatrix& w, const SolveConfig& cfg) {
    RefineResult out;
    Eigen::VectorXcd u = x.array().log().matrix();
    double last_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= cfg.max_iterations; ++it) {
        out.iterations = it;
        const auto sys = evaluate(n, x, w, true);
        if (!sys) {
            out.failure = {NoConvergence::Reason::Singular, last_norm, it};
            return out;
        }
        if (accepted(embed_free(n, x), w, cfg.residual_tolerance)) {
            out.x = x;
            return out;
        }
        last_norm = critical_residual(embed_free(n, x), w).norm;
        if (it == cfg.max_iterations) break;

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
        cod.setThreshold(1e-13);
        cod.compute(sys->J);
        const Eigen::VectorXcd du = cod.solve(-sys->G);
        if (!du.allFinite()) {
            out.failure = {NoConvergence::Reason::StepCollapse, last_norm, it};
            return out;
        }

        const double merit = sys->G.norm();
        double t = 1.0;
        bool moved = false;
        while (t >= kMinStepFactor) {
            const Eigen::VectorXcd trial_u = u + t * du;
            const Eigen::VectorXcd trial_x = trial_u.array().exp().matrix();
            const auto trial = evaluate(n, trial_x, w, false);
            if (trial && trial->G.norm() < (1.0 - 1e-4 * t) * merit) {
                u = trial_u;
                x = trial_x;
                moved = true;
                break;
            }
            t *= cfg.step_damping;
        }
        if (!moved) {
            out.failure = {NoConvergence::Reason::StepCollapse, last_norm, it};
            return out;
        }
    }
    out.failure = {NoConvergence::Reason::MaxIterations, last_norm, cfg.max_iterations};
    return out;
}

Eigen::VectorXcd to_vector(const GaugeSlicePoint& p) {
    const auto& f = p.free_entries();
    Eigen::VectorXcd x(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) x(static_cast<Eigen::Index>(i)) = f[i];
    return x;
}

GaugeSlicePoint to_slice(int n, const Eigen::VectorXcd& x) {
    return GaugeSlicePoint(n, std::vector<Complex>(x.data(), x.data() + x.size()));
}

double round_to(double v, double tol) {
    const double r = std::round(v / tol) * tol;
    return r == 0.0 ? 0.0 : r;  // no negative zero in keys
}

void push_rounded(std::vector<double>& values, Complex z, double tol) {
    values.push_back(round_to(z.real(), tol));
    values.push_back(round_to(z.imag(), tol));
}

}  // namespace

void SolveConfig::validate() const {
    if (starts < 0) throw PreconditionError("starts must be non-negative");
    if (starts + fourier_starts < 1) throw PreconditionError("at least one start is required");
    if (fourier_starts < 0) throw PreconditionError("fourier_starts must be non-negative");
    if (max_iterations < 1) throw PreconditionError("max_iterations must be positive");
    if (!(residual_tolerance > 0.0) || !(nullity_tolerance > 0.0) || !(cluster_tolerance > 0.0)) {
        throw PreconditionError("tolerances must be positive");
    }
    if (!(step_damping > 0.0 && step_damping < 1.0)) throw PreconditionError("step_damping must lie in (0, 1)");
    if (!(modulus_range.low > 0.0) || !(modulus_range.low <= modulus_range.high)) {
        throw PreconditionError("modulus range must satisfy 0 < low <= high");
    }
    if (!(fourier_perturbation >= 0.0)) throw PreconditionError("fourier_perturbation must be non-negative");
    if (threads < 1) throw PreconditionError("threads must be positive");
}

int default_starts(int n) { return n >= 6 ? 5000 : 100; }

std::string to_string(NoConvergence::Reason reason) {
    switch (reason) {
        case NoConvergence::Reason::MaxIterations: return "max_iterations";
        case NoConvergence::Reason::StepCollapse: return "step_collapse";
        case NoConvergence::Reason::Singular: return "singular";
    }
    return "unknown";
}

double unbiased_deviation(const ComplexSquareMatrix& g, const WeightMatrix& w) {
    const ComplexSquareMatrix ghat = invert(g);
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) worst = std::max(worst, std::abs(g(j, i) * ghat(i, j) - w(i, j)));
    }
    return worst;
}

GaugeSlicePoint regauge(const ComplexSquareMatrix& g) {
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
        if (g(i, 0) == Complex(0.0)) throw ZeroEntry(i, 0);
        if (g(0, i) == Complex(0.0)) throw ZeroEntry(0, i);
    }
    std::vector<Complex> free;
    free.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) free.push_back(g(i, j) * g(0, 0) / (g(i, 0) * g(0, j)));
    }
    return GaugeSlicePoint(n, std::move(free));
}

CanonicalKey canonicalize(const ComplexSquareMatrix& g, int nullity, double tol) {
    const int n = g.n();
    CanonicalKey key;
    key.nullity = nullity;

    Complex e = potential_power(g);
    if (n % 2 == 1) e *= e;
    const double scale = std::max(1.0, std::abs(e));
    key.values.push_back(round_to(std::log(scale), tol));
    push_rounded(key.values, e / scale, tol);

    std::vector<std::pair<double, double>> ratios;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                for (int l = j + 1; l < n; ++l) {
                    const Complex c = g(i, j) * g(k, l) / (g(i, l) * g(k, j));
                    for (const Complex z : {c, 1.0 / c}) ratios.emplace_back(round_to(z.real(), tol), round_to(z.imag(), tol));
                }
            }
        }
    }
    std::sort(ratios.begin(), ratios.end());
    for (const auto& [re, im] : ratios) {
        key.values.push_back(re);
        key.values.push_back(im);
    }
    return key;
}

CanonicalKey canonicalize(const CriticalPointRecord& r, double cluster_tolerance) {
    return canonicalize(r.slice_point.embed(), r.nullity, cluster_tolerance);
}

bool keys_match(const CanonicalKey& a, const CanonicalKey& b, double tol) {
    if (a.nullity != b.nullity || a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (std::abs(a.values[i] - b.values[i]) > 1.5 * tol) return false;
    }
    return true;
}

CriticalPointRecord make_record(const GaugeSlicePoint& p, const WeightMatrix& w, const SolveConfig& cfg) {
    const ComplexSquareMatrix g = p.embed();
    CriticalPointRecord r{p, critical_residual(g, w).norm, potential_power(g), {}, 0, 1, {}, 0};
    r.hessian_spectrum = singular_spectrum(hessian_slice(g, w), cfg.nullity_tolerance);
    r.nullity = r.hessian_spectrum.nullity;
    r.canonical_key = canonicalize(g, r.nullity, cfg.cluster_tolerance);
    return r;
}

NewtonOutcome newton_solve(const GaugeSlicePoint& start, const WeightMatrix& w, const SolveConfig& cfg) {
    const int n = start.n();
    if (n < 2) throw PreconditionError("newton_solve needs n >= 2");
    if (w.k() != n || w.n() != n) throw PreconditionError("weights must be n x n");
    const RefineResult res = refine(n, to_vector(start), w, cfg);
    if (!res.x) return res.failure;
    CriticalPointRecord record = make_record(to_slice(n, *res.x), w, cfg);
    record.iterations = res.iterations;
    return record;
}

GaugeSlicePoint multistart_start(int n, const SolveConfig& cfg, int index) {
    const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
    if (index < cfg.starts) return regauge(random_torus_matrix(n, seed, cfg.modulus_range));
    GaugeSlicePoint base = regauge(fourier_matrix(n));
    if (index == cfg.starts) return base;
    SplitMix64 rng(seed);
    std::vector<Complex> free = base.free_entries();
    for (auto& z : free) {
        const double re = rng.normal();
        const double im = rng.normal();
        z *= std::exp(cfg.fourier_perturbation * Complex(re, im));
    }
    return GaugeSlicePoint(n, std::move(free));
}

MultistartResult multistart(int n, const WeightMatrix& w, const SolveConfig& cfg) {
    cfg.validate();
    const int total = cfg.starts + cfg.fourier_starts;
    std::vector<std::optional<CriticalPointRecord>> outcomes(static_cast<std::size_t>(total));
    std::vector<char> rejected(static_cast<std::size_t>(total), 0);

    auto work = [&](int index) {
        const auto outcome = newton_solve(multistart_start(n, cfg, index), w, cfg);
        if (const auto* rec = std::get_if<CriticalPointRecord>(&outcome)) {
            // Independent re-check, separate from the Newton loop's acceptance.
            const ComplexSquareMatrix g = rec->slice_point.embed();
            if (critical_residual(g, w).norm < cfg.residual_tolerance &&
                check_unbiased_pair(g, w, 100.0 * cfg.residual_tolerance).passed) {
                outcomes[static_cast<std::size_t>(index)] = *rec;
            } else {
                rejected[static_cast<std::size_t>(index)] = 1;
            }
        }
    };

    if (cfg.threads <= 1) {
        for (int i = 0; i < total; ++i) work(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int t = 0; t < cfg.threads; ++t) {
            pool.emplace_back([&] {
                for (int i = next++; i < total; i = next++) work(i);
            });
        }
    }

    MultistartResult result;
    result.attempted = total;
    for (int i = 0; i < total; ++i) {
        result.rejected += rejected[static_cast<std::size_t>(i)];
        const auto& rec = outcomes[static_cast<std::size_t>(i)];
        if (!rec) continue;
        ++result.converged;
        auto it = std::find_if(result.clusters.begin(), result.clusters.end(), [&](const CriticalPointRecord& c) {
            return keys_match(c.canonical_key, rec->canonical_key, cfg.cluster_tolerance);
        });
        if (it != result.clusters.end()) {
            ++it->basin_count;
        } else {
            result.clusters.push_back(*rec);
        }
    }
    std::stable_sort(result.clusters.begin(), result.clusters.end(),
                     [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
                         return a.canonical_key < b.canonical_key;
                     });
    return result;
}

FamilyReport family_probe(const CriticalPointRecord& r, const WeightMatrix& w, const SolveConfig& cfg) {
    FamilyReport report;
    const int n = r.slice_point.n();
    const ComplexSquareMatrix g = r.slice_point.embed();
    const Eigen::MatrixXcd H = hessian_slice(g, w).eigen();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double largest = s(0);
    std::vector<Eigen::VectorXcd> null_dirs;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (largest < kSpectrumAbsoluteFloor || s(i) < cfg.nullity_tolerance * largest) {
            null_dirs.push_back(svd.matrixV().col(i));
        }
    }
    report.nullity = static_cast<int>(null_dirs.size());

    const Eigen::VectorXcd x0 = to_vector(r.slice_point);
    const double step = std::max(1e-3, 100.0 * cfg.cluster_tolerance);
    for (std::size_t d = 0; d < null_dirs.size(); ++d) {
        NullDirectionEvidence ev;
        ev.direction = static_cast<int>(d);
        for (const double sign : {1.0, -1.0}) {
            const Eigen::VectorXcd predicted = x0 + sign * step * null_dirs[d];
            const RefineResult res = refine(n, predicted, w, cfg);
            if (!res.x) continue;
            const double dist = (*res.x - x0).norm();
            ev.distance = dist;
            ev.residual = critical_residual(embed_free(n, *res.x), w).norm;
            if (dist >= 10.0 * cfg.cluster_tolerance) {
                ev.traced = true;
                break;
            }
        }
        if (ev.traced) ++report.traced_directions;
        report.directions.push_back(ev);
    }

    if (null_dirs.size() >= 2) {
        // At A = 0 the solution set sits in the zero section; tangents are (dg, 0).
        const CotangentPoint pt(g, ComplexSquareMatrix(n));
        const auto rs = phi_embed(pt);
        std::vector<std::vector<ComplexSquareMatrix>> pushed;
        for (const auto& v : null_dirs) {
            Eigen::MatrixXcd dg = Eigen::MatrixXcd::Zero(n, n);
            for (int rr = 1; rr < n; ++rr) {
                for (int c = 1; c < n; ++c) dg(rr, c) = v((rr - 1) * (n - 1) + (c - 1));
            }
            pushed.push_back(phi_differential(pt, {ComplexSquareMatrix(std::move(dg)), ComplexSquareMatrix(n)}));
        }
        for (std::size_t a = 0; a < pushed.size(); ++a) {
            for (std::size_t b = a + 1; b < pushed.size(); ++b) {
                report.isotropy_max = std::max(report.isotropy_max, std::abs(omega_Y(rs, pushed[a], pushed[b])));
            }
        }
    }

    if (report.nullity == 0) {
        report.status = "isolated";
    } else if (report.traced_directions > 0) {
        report.status = "family";
    } else {
        report.status = "unconfirmed degeneracy";
    }
    return report;
}

}  // namespace unbiased
