#include "unbiased/cli.hpp"

#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unbiased/io.hpp"

namespace unbiased {

namespace {

using io::Json;

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

struct Globals {
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::string out;
    bool json = false;
};

struct SolveArgs {
    int n = 0;
    std::string weights;
    int starts = -1;  // -1: default_starts(n)
    int max_iterations = 200;
    double step_damping = 0.5;
    double nullity_tolerance = 1e-6;
    double cluster_tolerance = 1e-6;
    double modulus_low = 0.5;
    double modulus_high = 2.0;
    bool fourier = false;
    int fourier_starts = 0;
    double fourier_perturbation = 0.1;
    int threads = 1;
    std::string csv;
};

struct VerifyArgs {
    std::string matrix;
    std::string weights;
    bool mub = false;
};

struct PolytopeArgs {
    int n = 0;
    std::string csv;
    bool points = false;
};

struct SymplecticArgs {
    int n = 0;
    int points = 20;
    int trials = 100;
    int lemma_instances = 1000;
};

struct FamilyArgs {
    std::optional<int> n;
    std::string records;
    std::string weights;
    double nullity_tolerance = 1e-6;
    double cluster_tolerance = 1e-6;
};

class UsageError : public Error {
public:
    using Error::Error;
};

void emit(std::ostream& out, const Globals& g, const Json& doc) {
    if (!g.out.empty()) io::write_json_file(g.out, doc);
    if (g.json) out << doc.dump(2) << '\n';
}

WeightMatrix load_weights(const std::string& spec, int n) {
    WeightMatrix w = io::parse_weights_spec(spec.empty() ? "uniform:" + std::to_string(n) : spec);
    if (w.n() != n) throw UsageError(fmt("weights have n = %d, expected %d", w.n(), n));
    return w;
}

SolveConfig solve_config(const SolveArgs& a, const Globals& g) {
    SolveConfig cfg;
    cfg.starts = a.starts < 0 ? default_starts(a.n) : a.starts;
    cfg.seed = g.seed;
    cfg.max_iterations = a.max_iterations;
    cfg.residual_tolerance = g.tol.value_or(cfg.residual_tolerance);
    cfg.step_damping = a.step_damping;
    cfg.nullity_tolerance = a.nullity_tolerance;
    cfg.cluster_tolerance = a.cluster_tolerance;
    cfg.modulus_range = {a.modulus_low, a.modulus_high};
    cfg.fourier_starts = std::max(a.fourier_starts, a.fourier ? 1 : 0);
    cfg.fourier_perturbation = a.fourier_perturbation;
    cfg.threads = a.threads;
    cfg.validate();
    return cfg;
}

int cmd_solve(const SolveArgs& a, const Globals& g, std::ostream& out) {
    if (a.n < 2) throw UsageError("solve needs --n >= 2");
    const SolveConfig cfg = solve_config(a, g);
    const WeightMatrix w = load_weights(a.weights, a.n);
    if (w.k() != a.n) throw UsageError("solve needs a square weight matrix");
    const WeightReport wr = validate_weights(w);
    if (!wr.valid) throw UsageError("weights fail validation: " + to_string(wr.violations.front().kind));

    const MultistartResult result = multistart(a.n, w, cfg);
    const double verify_tol = std::max(1e-8, 100.0 * cfg.residual_tolerance);
    int verified = 0;
    Json records = Json::array();
    for (const auto& c : result.clusters) {
        verified += check_unbiased_pair(c.slice_point.embed(), w, verify_tol).passed;
        records.push_back(io::to_json(c));
    }
    emit(out, g, records);

    if (!a.csv.empty()) {
        std::ofstream csv(a.csv);
        if (!csv) throw io::FormatError("cannot write " + a.csv);
        csv << "n,cluster,nullity,basin_count,abs_En\n";
        for (std::size_t i = 0; i < result.clusters.size(); ++i) {
            const auto& c = result.clusters[i];
            csv << fmt("%d,%zu,%d,%d,%.12e\n", a.n, i, c.nullity, c.basin_count, std::abs(c.potential_power));
        }
    }

    if (!g.json) {
        out << fmt("%7s %8s %7s %16s %10s\n", "cluster", "nullity", "basins", "|E^n|", "residual");
        for (std::size_t i = 0; i < result.clusters.size(); ++i) {
            const auto& c = result.clusters[i];
            out << fmt("%7zu %8d %7d %16.9e %10.2e\n", i, c.nullity, c.basin_count, std::abs(c.potential_power),
                       c.residual_norm);
        }
        out << fmt("starts %d, converged %d, rejected %d, clusters %zu\n", result.attempted, result.converged,
                   result.rejected, result.clusters.size());
        out << fmt("verification: %d/%zu clusters pass check_unbiased_pair at %.1e\n", verified,
                   result.clusters.size(), verify_tol);
    }
    if (result.clusters.empty()) return kExitNoConvergence;
    return verified == static_cast<int>(result.clusters.size()) ? kExitOk : kExitVerificationFailed;
}

void print_violations(std::ostream& out, const CheckReport& r) {
    for (const auto& v : r.violations) {
        std::string idx;
        for (const int i : v.indices) idx += (idx.empty() ? "" : ",") + std::to_string(i);
        out << fmt("  %-20s (%s) deviation %.3e\n", v.relation.c_str(), idx.c_str(), v.deviation);
    }
}

int cmd_verify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
    const ComplexSquareMatrix m = io::matrix_from_json(io::read_json_file(a.matrix));
    const WeightMatrix w = load_weights(a.weights, m.n());
    if (w.k() != m.n()) throw UsageError("verify needs a square weight matrix");
    const double tol = g.tol.value_or(1e-10);
    CheckReport report;
    try {
        report = check_unbiased_pair(m, w, tol);
    } catch (const SingularMatrix& e) {
        report.add("invertible", {}, e.pivot_magnitude());
    }
    if (a.mub) report.merge(check_mub(m, tol));
    emit(out, g, io::to_json(report));
    if (!g.json) {
        out << fmt("n = %d, tolerance %.1e: %s\n", m.n(), tol, report.passed ? "passed" : "FAILED");
        print_violations(out, report);
    }
    return report.passed ? kExitOk : kExitVerificationFailed;
}

int cmd_polytope(const PolytopeArgs& a, const Globals& g, std::ostream& out) {
    if (a.n < 1 || a.n > birkhoff::kMaxVertexN) throw SizeGuard(a.n, birkhoff::kMaxVertexN);
    const auto report = birkhoff::polytope_report(a.n);
    Json doc = io::to_json(report);
    if (a.n <= birkhoff::kMaxNewtonN) doc["newton_matches_vertices"] = birkhoff::newton_polytope_of_E(a.n).matches_vertices;
    const auto toric = birkhoff::toric_identification(a.n);
    if (!toric.claim.empty()) doc["toric"] = Json{{"claim", toric.claim}, {"certified", toric.certified}, {"detail", toric.detail}};
    if (a.points && a.n <= birkhoff::kMaxLatticeN) {
        Json pts = Json::array();
        for (const auto& p : birkhoff::lattice_points_enumerate(a.n)) pts.push_back(io::to_json(p));
        doc["lattice_points"] = pts;
    }
    if (!a.csv.empty() && a.n >= 2) {
        const auto cert = birkhoff::reflexive_check(a.n);
        std::ofstream csv(a.csv);
        if (!csv) throw io::FormatError("cannot write " + a.csv);
        csv << "vertex";
        for (const auto& f : cert.facets) csv << fmt(",l%d%d", f.row, f.col);
        csv << '\n';
        for (std::size_t v = 0; v < cert.table.size(); ++v) {
            csv << v;
            for (const auto x : cert.table[v]) csv << ',' << x;
            csv << '\n';
        }
    }
    emit(out, g, doc);
    if (!g.json) {
        out << fmt("n = %d\nvertices %d\nfacets %d\ndimension %d\nreflexive %s\n", report.n, report.vertex_count,
                   report.facet_count, report.dimension, report.reflexive ? "true" : "false");
        if (report.lattice_point_count) {
            out << fmt("lattice points %d\nterminal %s\n", *report.lattice_point_count,
                       *report.terminal ? "true" : "false");
        } else {
            out << fmt("terminal: not certified (lattice enumeration needs n <= %d)\n", birkhoff::kMaxLatticeN);
        }
        if (doc.contains("newton_matches_vertices")) {
            out << "newton polytope of E matches vertices " << (doc["newton_matches_vertices"].get<bool>() ? "true" : "false") << '\n';
        }
        if (!toric.claim.empty()) {
            out << "toric " << toric.claim << ": " << (toric.certified ? "certified" : "not certified") << ", "
                << toric.detail << '\n';
        }
    }
    if (!report.terminal) return kExitUsage;
    return report.reflexive && *report.terminal ? kExitOk : kExitVerificationFailed;
}

int cmd_symplectic(const SymplecticArgs& a, const Globals& g, std::ostream& out) {
    if (a.n < 1) throw UsageError("symplectic needs --n >= 1");
    if (a.trials < 1 || a.points < 1 || a.lemma_instances < 1) {
        throw UsageError("--trials, --points and --lemma-instances must be positive");
    }
    const double tol = g.tol.value_or(1e-8);
    DeviationReport total;
    total.seed = g.seed;
    for (int p = 0; p < a.points; ++p) {
        const CotangentPoint pt = random_cotangent_point(a.n, derive_seed(g.seed, static_cast<std::uint64_t>(p)));
        const auto r = pullback_symplectic_check(pt, a.trials, derive_seed(g.seed, 1000003u + static_cast<std::uint64_t>(p)), tol);
        total.max_deviation = std::max(total.max_deviation, r.max_deviation);
        total.trials += r.trials;
    }
    total.passed = total.max_deviation < tol;

    Json lemma = Json::array();
    int counterexamples = 0;
    for (int k = 1; k <= a.n; ++k) {
        const auto r = rank_k_lemma_battery(a.n, k, a.lemma_instances, derive_seed(g.seed, 2000003u + static_cast<std::uint64_t>(k)), tol);
        counterexamples += r.counterexamples;
        lemma.push_back(Json{{"k", k}, {"instances", r.instances}, {"orthogonal_instances", r.orthogonal_instances},
                             {"counterexamples", r.counterexamples}});
    }
    const CheckReport commute = integrable_commute_check(a.n, a.trials, derive_seed(g.seed, 3000017u));

    Json doc{{"symplectic", io::to_json(total)}, {"points", a.points}, {"tolerance", tol},
             {"lemma", lemma}, {"commute", io::to_json(commute)}};
    emit(out, g, doc);
    if (!g.json) {
        out << fmt("pullback: %d points x %d tangent pairs, max deviation %.3e (tolerance %.1e) %s\n", a.points,
                   a.trials, total.max_deviation, tol, total.passed ? "ok" : "FAILED");
        out << fmt("rank-k lemma: %d instances per k, %d counterexamples\n", a.lemma_instances, counterexamples);
        out << fmt("commuting hamiltonians: %d samples, %zu nonzero brackets\n", a.trials, commute.violations.size());
    }
    return total.passed && counterexamples == 0 && commute.passed ? kExitOk : kExitVerificationFailed;
}

int cmd_family(const FamilyArgs& a, const Globals& g, std::ostream& out) {
    const Json doc = io::read_json_file(a.records);
    if (!doc.is_array()) throw io::FormatError(a.records + ": expected an array of records");
    SolveConfig cfg;
    cfg.seed = g.seed;
    cfg.residual_tolerance = g.tol.value_or(cfg.residual_tolerance);
    cfg.nullity_tolerance = a.nullity_tolerance;
    cfg.cluster_tolerance = a.cluster_tolerance;
    cfg.validate();

    Json reports = Json::array();
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const io::StoredRecord stored = io::record_from_json(doc[i]);
        const int n = stored.slice_point.n();
        if (a.n && *a.n != n) throw UsageError(fmt("record %zu has n = %d, expected %d", i, n, *a.n));
        const WeightMatrix w = load_weights(a.weights, n);
        CriticalPointRecord record = make_record(stored.slice_point, w, cfg);
        record.basin_count = stored.basin_count;
        const FamilyReport f = family_probe(record, w, cfg);
        Json entry = io::to_json(f);
        entry["cluster"] = i;
        entry["n"] = n;
        reports.push_back(entry);
        rows.push_back(fmt("%7zu %3d %8d %7d %-24s %10.2e\n", i, n, f.nullity, f.traced_directions, f.status.c_str(),
                           f.isotropy_max));
    }
    emit(out, g, reports);
    if (!g.json) {
        out << fmt("%7s %3s %8s %7s %-24s %10s\n", "cluster", "n", "nullity", "traced", "status", "isotropy");
        for (const auto& r : rows) out << r;
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unbiased projector systems: critical points, certificates and checks", "unbiased"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML file mirroring the command-line flags");

    Globals globals;
    app.add_option("--seed", globals.seed, "Seed for every random stream")->capture_default_str();
    app.add_option("--tol", globals.tol, "Tolerance of the selected command")->check(CLI::PositiveNumber);
    app.add_option("--out", globals.out, "Write the JSON document to this path");
    app.add_flag("--json", globals.json, "Print JSON instead of tables");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Multistart Newton search for critical points");
    s->add_option("--n", solve.n, "Dimension")->required();
    s->add_option("--weights", solve.weights, "uniform:n or a weight JSON file");
    s->add_option("--starts", solve.starts, "Random starts (default 100, or 5000 for n >= 6)");
    s->add_option("--max-iterations", solve.max_iterations)->capture_default_str();
    s->add_option("--damping", solve.step_damping, "Backtracking factor")->capture_default_str();
    s->add_option("--nullity-tol", solve.nullity_tolerance)->capture_default_str();
    s->add_option("--cluster-tol", solve.cluster_tolerance)->capture_default_str();
    s->add_option("--modulus-low", solve.modulus_low)->capture_default_str();
    s->add_option("--modulus-high", solve.modulus_high)->capture_default_str();
    s->add_flag("--fourier", solve.fourier, "Add one start at the Fourier matrix");
    s->add_option("--fourier-starts", solve.fourier_starts, "Fourier-seeded starts, the first exact")->capture_default_str();
    s->add_option("--fourier-perturbation", solve.fourier_perturbation)->capture_default_str();
    s->add_option("--threads", solve.threads)->capture_default_str();
    s->add_option("--csv", solve.csv, "Write a per-cluster CSV summary");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check a transition matrix against unbiasedness targets");
    v->add_option("--matrix", verify.matrix, "Matrix JSON file")->required();
    v->add_option("--weights", verify.weights, "uniform:n or a weight JSON file");
    v->add_flag("--mub", verify.mub, "Also check the unitary (mutually unbiased) specialization");

    PolytopeArgs polytope;
    auto* p = app.add_subcommand("polytope", "Exact certificates for the Birkhoff polytope");
    p->add_option("--n", polytope.n)->required();
    p->add_option("--csv", polytope.csv, "Write the facet-value table");
    p->add_flag("--points", polytope.points, "Include lattice points in the JSON");

    SymplecticArgs symp;
    auto* y = app.add_subcommand("symplectic", "Embedding, rank-k lemma and commutation checks");
    y->add_option("--n", symp.n)->required();
    y->add_option("--points", symp.points, "Random cotangent points")->capture_default_str();
    y->add_option("--trials", symp.trials, "Tangent pairs per point")->capture_default_str();
    y->add_option("--lemma-instances", symp.lemma_instances, "Random tuples per k")->capture_default_str();

    FamilyArgs family;
    auto* f = app.add_subcommand("family", "Probe Hessian null directions of stored critical points");
    f->add_option("--n", family.n);
    f->add_option("--records", family.records, "Results file written by solve")->required();
    f->add_option("--weights", family.weights, "uniform:n or a weight JSON file");
    f->add_option("--nullity-tol", family.nullity_tolerance)->capture_default_str();
    f->add_option("--cluster-tol", family.cluster_tolerance)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_solve(solve, globals, out);
        if (v->parsed()) return cmd_verify(verify, globals, out);
        if (p->parsed()) return cmd_polytope(polytope, globals, out);
        if (y->parsed()) return cmd_symplectic(symp, globals, out);
        if (f->parsed()) return cmd_family(family, globals, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace unbiased
