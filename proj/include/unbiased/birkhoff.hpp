#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unbiased::birkhoff {

/// Integer n x n matrix in shifted coordinates l_ij = n lambda_ij - 1, so the
/// barycenter Lambda_o (all entries 1/n) sits at the origin.
struct LatticeMatrixPoint {
    int n = 0;
    std::vector<std::int64_t> entries;  // row-major

    std::int64_t operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * n + j)]; }
    /// Zero row and column sums.
    bool in_affine_lattice_plane() const;
    bool operator==(const LatticeMatrixPoint&) const = default;
    auto operator<=>(const LatticeMatrixPoint&) const = default;
};

inline constexpr int kMaxVertexN = 8;
inline constexpr int kMaxLatticeN = 5;
inline constexpr int kMaxNewtonN = 7;
inline constexpr int kMaxBruteForceN = 4;

/// Permutations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> permutations(int n);
int permutation_sign(const std::vector<int>& perm);

/// l-coordinates of the permutation matrix of perm.
LatticeMatrixPoint permutation_point(const std::vector<int>& perm);

/// All n! permutation matrices in l-coordinates, lexicographic order.
std::vector<LatticeMatrixPoint> permutation_vertices(int n);

/// Each vertex is the unique maximizer of its own functional <P_sigma, .>
/// over the vertex set. Quadratic in n!.
bool certify_vertices(const std::vector<LatticeMatrixPoint>& vertices);

/// Facet functional l -> l_ij, supporting the facet lambda_ij = 0 at value -1.
struct FacetFunctional {
    int row = 0;
    int col = 0;
    /// Positions (i, j) whose functionals coincide with this one on the plane.
    std::vector<std::pair<int, int>> merged;
    /// Vertices attaining -1.
    int vertices_on_facet = 0;
};

/// Distinct facet functionals; each verified to support a face of dimension
/// dim - 1 by exact affine rank.
std::vector<FacetFunctional> facet_enumerate(int n);

/// Exact affine rank (dimension of the affine hull) of a point set.
int affine_rank(const std::vector<LatticeMatrixPoint>& points);

struct ReflexiveCertificate {
    bool reflexive = false;
    /// table[v][f]: value of facet functional f on vertex v.
    std::vector<std::vector<std::int64_t>> table;
    std::vector<FacetFunctional> facets;
};

ReflexiveCertificate reflexive_check(int n);

/// Lattice points by the residue-class argument: all entries share one
/// residue k/n mod 1, which forces either a 0/1 matrix (a permutation) or
/// the barycenter.
std::vector<LatticeMatrixPoint> lattice_points_enumerate(int n);

/// Independent enumeration over rows with entries in {0, 1/n, ..., 1} and
/// row sum 1, keeping matrices with unit column sums in the lattice.
std::vector<LatticeMatrixPoint> lattice_points_brute_force(int n);

/// True iff the lattice points are exactly the vertices plus the origin.
bool terminal_check(int n);
bool terminal_check(int n, const std::vector<LatticeMatrixPoint>& lattice_points);

struct SignedMonomial {
    int sign = 0;
    LatticeMatrixPoint exponent;  // l-coordinates of the exponent shifted by -Lambda_o
};

struct NewtonPolytopeReport {
    std::vector<SignedMonomial> monomials;
    /// Exponents equal the vertex set and each sign is the permutation sign.
    bool matches_vertices = false;
};

/// Expands det g by cofactors into signed monomials and compares with the
/// permutation vertices.
NewtonPolytopeReport newton_polytope_of_E(int n);

/// Exact lattice certificates for the small toric identifications.
struct ToricIdentification {
    std::string claim;  // "P1", "P2xP2" or empty
    bool certified = false;
    std::string detail;
};

/// n = 2: segment [-1, 1] with 3 lattice points. n = 3: vertices split into
/// two zero-sum triangles (even and odd permutations) whose members, two from
/// each, form a basis of the lattice, i.e. the polytope is the free sum of two
/// unimodular triangles and its face fan is the fan of P2 x P2.
ToricIdentification toric_identification(int n);

/// Index of the lattice N in Z^{(n-1)^2} (block coordinates): n^{(n-1)^2 - 1}.
std::int64_t lattice_index(int n);

struct PolytopeReport {
    int n = 0;
    int vertex_count = 0;
    int facet_count = 0;
    int dimension = 0;
    bool reflexive = false;
    std::optional<int> lattice_point_count;  // only for n <= kMaxLatticeN
    std::optional<bool> terminal;
};

PolytopeReport polytope_report(int n);

}  // namespace unbiased::birkhoff
