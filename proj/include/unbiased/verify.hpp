#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unbiased/linalg.hpp"
#include "unbiased/potential.hpp"

namespace unbiased {

struct Violation {
    std::string relation;
    std::vector<int> indices;  // 0-based
    double deviation;
};

struct CheckReport {
    bool passed = true;
    std::vector<Violation> violations;

    void add(std::string relation, std::vector<int> indices, double deviation);
    void merge(const CheckReport& other);
};

/// Ordered projectors sharing one dimension. Only the member at
/// `aggregate_index` may have rank above one.
struct ProjectorSystem {
    int n = 0;
    std::vector<ComplexSquareMatrix> members;
    double tolerance = 1e-10;
    std::optional<int> aggregate_index;
    /// Pairs (a, b) that must multiply to zero both ways.
    std::vector<std::pair<int, int>> orthogonal_pairs;
};

/// Idempotency, rank-1 and declared-orthogonality checks.
///
/// Projectors built from an ill-conditioned g have operator norm up to cond(g),
/// so deviations are scaled: ||m^2 - m|| / max(1, ||m||^2) and
/// ||a b|| / max(1, ||a|| ||b||).
CheckReport check_projector_system(const ProjectorSystem& ps);

/// Coordinate projectors q_i = e_ii.
std::vector<ComplexSquareMatrix> coordinate_projectors(int n);

/// p_i = g q_i g^{-1}; declared complete and pairwise orthogonal.
ProjectorSystem projectors_from_transition(const ComplexSquareMatrix& g, double tolerance = 1e-10);

/// |Tr(p_i q_j) - lambda_ij| <= tol, ||p_i q_j p_i - lambda_ij p_i|| <= tol * n,
/// plus the projector-system invariants of {p_i}.
CheckReport check_unbiased_pair(const ComplexSquareMatrix& g, const WeightMatrix& w, double tol);

struct GraphEdge {
    int a;
    int b;
    Complex weight;
};

/// Simply laced weighted graph without loops or duplicate edges.
class GraphSpec {
public:
    GraphSpec(std::vector<std::string> vertices, std::vector<GraphEdge> edges);

    const std::vector<std::string>& vertices() const noexcept { return vertices_; }
    const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
    /// Edge weight, or nullopt for non-adjacent vertices.
    std::optional<Complex> weight(int a, int b) const;

private:
    std::vector<std::string> vertices_;
    std::vector<GraphEdge> edges_;
    std::map<std::pair<int, int>, Complex> lookup_;
};

/// Full bipartite graph on p_1..p_k and q_1..q_n with edge weights lambda_ij.
GraphSpec bipartite_graph(const WeightMatrix& w);

/// Complete multipartite graph with `rows` rows of `row_size` mutually
/// orthogonal vertices and weight `weight` between rows.
GraphSpec multipartite_graph(int rows, int row_size, Complex weight);

struct GraphCheckReport {
    CheckReport report;
    /// Shared numeric rank of all generators, if they agree.
    std::optional<int> common_rank;
};

/// Verifies x^2 = x, x_i x_j x_i = lambda_ij x_i on edges and x_i x_j = 0
/// on non-edges.
GraphCheckReport check_graph_representation(const GraphSpec& graph,
                                             const std::map<std::string, ComplexSquareMatrix>& assignment,
                                             double tol);

/// P^2 = P, rank P = k, q_i q_j = 0 (i != j), q_i P q_i = lambda_i q_i.
CheckReport check_admissible_A_representation(const ProjectorSystem& qs, const ComplexSquareMatrix& P,
                                              const std::vector<Complex>& lambda_bar, int k, double tol);

/// Pushes k pairwise orthogonal rank-1 projectors through q_i -> q_i,
/// P -> sum p_i and checks the image relations with lambda_j = sum_i lambda_ij.
CheckReport check_psi_pushforward(const ProjectorSystem& ps, const WeightMatrix& w, double tol);

/// g^dagger g = n I and |g_ij|^2 = 1.
CheckReport check_mub(const ComplexSquareMatrix& g, double tol);

}  // namespace unbiased
