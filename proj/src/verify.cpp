#include "unbiased/verify.hpp"

#include <algorithm>
#include <cmath>

#include "unbiased/errors.hpp"

namespace unbiased {

namespace {

double scaled_idempotency(const ComplexSquareMatrix& m) {
    const double norm = m.operator_norm();
    return (m * m - m).operator_norm() / std::max(1.0, norm * norm);
}

double scaled_product(const ComplexSquareMatrix& a, const ComplexSquareMatrix& b) {
    return (a * b).operator_norm() / std::max(1.0, a.operator_norm() * b.operator_norm());
}

}  // namespace

void CheckReport::add(std::string relation, std::vector<int> indices, double deviation) {
    violations.push_back({std::move(relation), std::move(indices), deviation});
    passed = false;
}

void CheckReport::merge(const CheckReport& other) {
    for (const auto& v : other.violations) add(v.relation, v.indices, v.deviation);
}

CheckReport check_projector_system(const ProjectorSystem& ps) {
    CheckReport report;
    for (std::size_t a = 0; a < ps.members.size(); ++a) {
        const auto& m = ps.members[a];
        const int ia = static_cast<int>(a);
        if (m.n() != ps.n) throw PreconditionError("projector dimension mismatch");
        const double dev = scaled_idempotency(m);
        if (dev > ps.tolerance) report.add("idempotent", {ia}, dev);
        if (ps.aggregate_index && *ps.aggregate_index == ia) continue;
        const int rank = numeric_rank(m, ps.tolerance);
        if (rank != 1) report.add("rank_one", {ia}, static_cast<double>(rank));
    }
    for (const auto& [a, b] : ps.orthogonal_pairs) {
        const auto& ma = ps.members.at(static_cast<std::size_t>(a));
        const auto& mb = ps.members.at(static_cast<std::size_t>(b));
        const double dev = std::max(scaled_product(ma, mb), scaled_product(mb, ma));
        if (dev > ps.tolerance) report.add("orthogonal", {a, b}, dev);
    }
    return report;
}

std::vector<ComplexSquareMatrix> coordinate_projectors(int n) {
    std::vector<ComplexSquareMatrix> qs;
    qs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) qs.push_back(ComplexSquareMatrix::unit(n, i, i));
    return qs;
}

ProjectorSystem projectors_from_transition(const ComplexSquareMatrix& g, double tolerance) {
    const ComplexSquareMatrix ginv = invert(g);
    const int n = g.n();
    ProjectorSystem ps;
    ps.n = n;
    ps.tolerance = tolerance;
    for (int i = 0; i < n; ++i) {
        // g q_i g^{-1} is the outer product of column i of g and row i of g^{-1}.
        ps.members.emplace_back(Eigen::MatrixXcd(g.eigen().col(i) * ginv.eigen().row(i)));
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) ps.orthogonal_pairs.emplace_back(a, b);
    }
    return ps;
}

CheckReport check_unbiased_pair(const ComplexSquareMatrix& g, const WeightMatrix& w, double tol) {
    if (w.k() != w.n() || w.n() != g.n()) throw PreconditionError("weights must be n x n");
    require_nonzero_entries(g);
    const int n = g.n();
    const ProjectorSystem ps = projectors_from_transition(g, tol);
    const auto qs = coordinate_projectors(n);
    CheckReport report;
    for (int i = 0; i < n; ++i) {
        const auto& p = ps.members[static_cast<std::size_t>(i)];
        const double pnorm = p.operator_norm();
        for (int j = 0; j < n; ++j) {
            const Complex lambda = w(i, j);
            const double tr_dev = std::abs(p(j, j) - lambda);
            if (tr_dev > tol) report.add("trace", {i, j}, tr_dev);
            const ComplexSquareMatrix pqp = p * qs[static_cast<std::size_t>(j)] * p;
            const double dev = (pqp - p * lambda).operator_norm() / std::max(1.0, pnorm * pnorm);
            if (dev > tol * n) report.add("pqp", {i, j}, dev);
        }
    }
    report.merge(check_projector_system(ps));
    return report;
}

GraphSpec::GraphSpec(std::vector<std::string> vertices, std::vector<GraphEdge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    const int nv = static_cast<int>(vertices_.size());
    for (const auto& e : edges_) {
        if (e.a < 0 || e.b < 0 || e.a >= nv || e.b >= nv) throw PreconditionError("edge endpoint out of range");
        if (e.a == e.b) throw PreconditionError("graph may not contain loops");
        if (e.weight == Complex(0.0)) throw PreconditionError("edge weights must be nonzero");
        const auto key = std::minmax(e.a, e.b);
        if (!lookup_.emplace(key, e.weight).second) throw PreconditionError("duplicate edge");
    }
}

std::optional<Complex> GraphSpec::weight(int a, int b) const {
    const auto it = lookup_.find(std::minmax(a, b));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

GraphSpec bipartite_graph(const WeightMatrix& w) {
    std::vector<std::string> vertices;
    for (int i = 0; i < w.k(); ++i) vertices.push_back("p" + std::to_string(i + 1));
    for (int j = 0; j < w.n(); ++j) vertices.push_back("q" + std::to_string(j + 1));
    std::vector<GraphEdge> edges;
    for (int i = 0; i < w.k(); ++i) {
        for (int j = 0; j < w.n(); ++j) edges.push_back({i, w.k() + j, w(i, j)});
    }
    return GraphSpec(std::move(vertices), std::move(edges));
}

GraphSpec multipartite_graph(int rows, int row_size, Complex weight) {
    std::vector<std::string> vertices;
    for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < row_size; ++i) vertices.push_back("x" + std::to_string(r + 1) + "_" + std::to_string(i + 1));
    }
    std::vector<GraphEdge> edges;
    for (int a = 0; a < rows * row_size; ++a) {
        for (int b = a + 1; b < rows * row_size; ++b) {
            if (a / row_size != b / row_size) edges.push_back({a, b, weight});
        }
    }
    return GraphSpec(std::move(vertices), std::move(edges));
}

GraphCheckReport check_graph_representation(const GraphSpec& graph,
                                             const std::map<std::string, ComplexSquareMatrix>& assignment,
                                             double tol) {
    GraphCheckReport out;
    const auto& names = graph.vertices();
    std::vector<const ComplexSquareMatrix*> x;
    for (const auto& name : names) {
        const auto it = assignment.find(name);
        if (it == assignment.end()) throw PreconditionError("no matrix assigned to vertex " + name);
        x.push_back(&it->second);
    }
    const int nv = static_cast<int>(x.size());
    if (nv == 0) return out;
    const int dim = x.front()->n();
    std::optional<int> rank;
    bool rank_agrees = true;
    for (int a = 0; a < nv; ++a) {
        if (x[static_cast<std::size_t>(a)]->n() != dim) throw PreconditionError("assignment dimensions differ");
        const auto& xa = *x[static_cast<std::size_t>(a)];
        const double dev = scaled_idempotency(xa);
        if (dev > tol) out.report.add("idempotent", {a}, dev);
        const int r = numeric_rank(xa, tol);
        if (!rank) rank = r;
        else if (*rank != r) rank_agrees = false;
    }
    for (int a = 0; a < nv; ++a) {
        for (int b = a + 1; b < nv; ++b) {
            const auto& xa = *x[static_cast<std::size_t>(a)];
            const auto& xb = *x[static_cast<std::size_t>(b)];
            if (const auto lambda = graph.weight(a, b)) {
                const double sa = std::max(1.0, std::pow(xa.operator_norm(), 2) * xb.operator_norm());
                const double sb = std::max(1.0, std::pow(xb.operator_norm(), 2) * xa.operator_norm());
                const double da = (xa * xb * xa - xa * *lambda).operator_norm() / sa;
                const double db = (xb * xa * xb - xb * *lambda).operator_norm() / sb;
                if (da > tol) out.report.add("edge", {a, b}, da);
                if (db > tol) out.report.add("edge", {b, a}, db);
            } else {
                const double dev = std::max(scaled_product(xa, xb), scaled_product(xb, xa));
                if (dev > tol) out.report.add("orthogonal", {a, b}, dev);
            }
        }
    }
    if (rank_agrees) out.common_rank = rank;
    return out;
}

CheckReport check_admissible_A_representation(const ProjectorSystem& qs, const ComplexSquareMatrix& P,
                                              const std::vector<Complex>& lambda_bar, int k, double tol) {
    const int n = static_cast<int>(qs.members.size());
    if (static_cast<int>(lambda_bar.size()) != n) throw PreconditionError("lambda_bar length must match system size");
    CheckReport report;
    const double pdev = scaled_idempotency(P);
    if (pdev > tol) report.add("P_idempotent", {}, pdev);
    const int rank = numeric_rank(P, tol);
    if (rank != k) report.add("P_rank", {}, std::abs(rank - k));
    for (int i = 0; i < n; ++i) {
        const auto& qi = qs.members[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            const auto& qj = qs.members[static_cast<std::size_t>(j)];
            const double dev = std::max(scaled_product(qi, qj), scaled_product(qj, qi));
            if (dev > tol) report.add("q_orthogonal", {i, j}, dev);
        }
        const double scale = std::max(1.0, std::pow(qi.operator_norm(), 2) * P.operator_norm());
        const double dev = (qi * P * qi - qi * lambda_bar[static_cast<std::size_t>(i)]).operator_norm() / scale;
        if (dev > tol) report.add("qPq", {i}, dev);
    }
    return report;
}

CheckReport check_psi_pushforward(const ProjectorSystem& ps, const WeightMatrix& w, double tol) {
    const int k = static_cast<int>(ps.members.size());
    if (k < 1) throw PreconditionError("pushforward needs at least one projector");
    if (w.k() != k || w.n() != ps.n) throw PreconditionError("weights must be k x n");
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(ps.n, ps.n);
    for (const auto& p : ps.members) sum += p.eigen();
    std::vector<Complex> lambda_bar(static_cast<std::size_t>(ps.n));
    for (int j = 0; j < ps.n; ++j) lambda_bar[static_cast<std::size_t>(j)] = w.eigen().col(j).sum();
    ProjectorSystem qs;
    qs.n = ps.n;
    qs.tolerance = tol;
    qs.members = coordinate_projectors(ps.n);
    CheckReport report = check_admissible_A_representation(qs, ComplexSquareMatrix(std::move(sum)), lambda_bar, k, tol);

    ProjectorSystem sources = ps;
    sources.tolerance = tol;
    sources.orthogonal_pairs.clear();
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) sources.orthogonal_pairs.emplace_back(a, b);
    }
    report.merge(check_projector_system(sources));
    return report;
}

CheckReport check_mub(const ComplexSquareMatrix& g, double tol) {
    const int n = g.n();
    CheckReport report;
    const ComplexSquareMatrix gram = g.adjoint() * g;
    const double dev = (gram - ComplexSquareMatrix::identity(n) * Complex(n)).max_abs();
    if (dev > tol * n) report.add("scaled_unitary", {}, dev);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = std::abs(std::norm(g(i, j)) - 1.0);
            if (d > tol) report.add("unimodular", {i, j}, d);
        }
    }
    return report;
}

}  // namespace unbiased
