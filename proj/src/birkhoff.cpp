#include "unbiased/birkhoff.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "unbiased/errors.hpp"

namespace unbiased::birkhoff {

namespace {

using Row = std::vector<std::int64_t>;

void guard(int n, int limit) {
    if (n < 1) throw PreconditionError("n must be positive");
    if (n > limit) throw SizeGuard(n, limit);
}

std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error("exact rank computation overflowed 64 bits");
    return static_cast<std::int64_t>(v);
}

// Echelon basis over Q kept as primitive integer rows. Rows are stored in
// insertion order; each row is zero at the pivots of the rows before it.
class ExactRank {
public:
    explicit ExactRank(std::size_t width) : width_(width) {}

    void insert(Row v) {
        for (std::size_t b = 0; b < rows_.size(); ++b) {
            const std::size_t p = pivots_[b];
            if (v[p] == 0) continue;
            const __int128 a = rows_[b][p];
            const __int128 c = v[p];
            for (std::size_t k = 0; k < width_; ++k) v[k] = checked(a * v[k] - c * rows_[b][k]);
            normalize(v);
        }
        const auto nz = std::find_if(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
        if (nz == v.end()) return;
        pivots_.push_back(static_cast<std::size_t>(nz - v.begin()));
        rows_.push_back(std::move(v));
    }

    int rank() const { return static_cast<int>(rows_.size()); }

private:
    static void normalize(Row& v) {
        std::int64_t g = 0;
        for (const auto x : v) g = std::gcd(g, x < 0 ? -x : x);
        if (g > 1) {
            for (auto& x : v) x /= g;
        }
    }

    std::size_t width_;
    std::vector<Row> rows_;
    std::vector<std::size_t> pivots_;
};

Row block_coordinates(const LatticeMatrixPoint& p) {
    Row out;
    for (int i = 0; i + 1 < p.n; ++i) {
        for (int j = 0; j + 1 < p.n; ++j) out.push_back(p(i, j));
    }
    return out;
}

int affine_rank_capped(const std::vector<LatticeMatrixPoint>& points, int cap) {
    if (points.size() < 2) return 0;
    const Row base = points.front().entries;
    ExactRank rank(base.size());
    // Visit points in a coprime stride so that early differences are spread
    // out and the cap is reached quickly on lexicographic inputs.
    const std::size_t count = points.size();
    std::size_t stride = count * 5 / 8 + 1;
    while (std::gcd(stride, count) != 1) ++stride;
    for (std::size_t i = 1; i < count && rank.rank() < cap; ++i) {
        Row d = points[(i * stride) % count].entries;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= base[k];
        rank.insert(std::move(d));
    }
    return rank.rank();
}

// Enumerates n x n matrices whose rows come from `rows` and whose column sums
// vanish; column partial sums prune the search.
void combine_rows(int n, const std::vector<Row>& rows, const std::function<void(const Row&)>& emit) {
    Row current(static_cast<std::size_t>(n * n));
    Row colsum(static_cast<std::size_t>(n), 0);
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    for (const auto& r : rows) {
        for (const auto x : r) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    std::function<void(int)> rec = [&](int row) {
        if (row == n) {
            if (std::all_of(colsum.begin(), colsum.end(), [](std::int64_t s) { return s == 0; })) emit(current);
            return;
        }
        const std::int64_t remaining = n - row - 1;
        for (const auto& r : rows) {
            bool feasible = true;
            for (int j = 0; j < n; ++j) {
                const std::int64_t s = colsum[static_cast<std::size_t>(j)] + r[static_cast<std::size_t>(j)];
                if (s + remaining * lo > 0 || s + remaining * hi < 0) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            for (int j = 0; j < n; ++j) {
                colsum[static_cast<std::size_t>(j)] += r[static_cast<std::size_t>(j)];
                current[static_cast<std::size_t>(row * n + j)] = r[static_cast<std::size_t>(j)];
            }
            rec(row + 1);
            for (int j = 0; j < n; ++j) colsum[static_cast<std::size_t>(j)] -= r[static_cast<std::size_t>(j)];
        }
    };
    rec(0);
}

// All length-n rows with entries from `values` summing to zero.
std::vector<Row> zero_sum_rows(int n, const std::vector<std::int64_t>& values) {
    std::vector<Row> out;
    Row cur;
    std::function<void(std::int64_t)> rec = [&](std::int64_t sum) {
        if (static_cast<int>(cur.size()) == n) {
            if (sum == 0) out.push_back(cur);
            return;
        }
        for (const auto v : values) {
            cur.push_back(v);
            rec(sum + v);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// Points of N in l-coordinates have all entries congruent mod n.
bool in_lattice(int n, const Row& entries) {
    const auto r = ((entries.front() % n) + n) % n;
    return std::all_of(entries.begin(), entries.end(), [&](std::int64_t x) { return ((x % n) + n) % n == r; });
}

std::int64_t det_exact(std::vector<Row> m) {
    // Bareiss fraction-free elimination.
    const std::size_t n = m.size();
    __int128 prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = checked((static_cast<__int128>(m[i][j]) * m[k][k] - static_cast<__int128>(m[i][k]) * m[k][j]) / prev);
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace

bool LatticeMatrixPoint::in_affine_lattice_plane() const {
    for (int i = 0; i < n; ++i) {
        std::int64_t rs = 0;
        std::int64_t cs = 0;
        for (int j = 0; j < n; ++j) {
            rs += (*this)(i, j);
            cs += (*this)(j, i);
        }
        if (rs != 0 || cs != 0) return false;
    }
    return true;
}

std::vector<std::vector<int>> permutations(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

int permutation_sign(const std::vector<int>& perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
    }
    return inversions % 2 == 0 ? 1 : -1;
}

LatticeMatrixPoint permutation_point(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    LatticeMatrixPoint p{n, Row(static_cast<std::size_t>(n * n), -1)};
    for (int i = 0; i < n; ++i) p.entries[static_cast<std::size_t>(i * n + perm[static_cast<std::size_t>(i)])] = n - 1;
    return p;
}

std::vector<LatticeMatrixPoint> permutation_vertices(int n) {
    guard(n, kMaxVertexN);
    std::vector<LatticeMatrixPoint> out;
    for (const auto& perm : permutations(n)) out.push_back(permutation_point(perm));
    return out;
}

bool certify_vertices(const std::vector<LatticeMatrixPoint>& vertices) {
    for (std::size_t s = 0; s < vertices.size(); ++s) {
        const auto& v = vertices[s];
        const int n = v.n;
        std::vector<int> support(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (v(i, j) == n - 1) support[static_cast<std::size_t>(i)] = j;
            }
        }
        auto functional = [&](const LatticeMatrixPoint& x) {
            std::int64_t sum = 0;
            for (int i = 0; i < n; ++i) sum += x(i, support[static_cast<std::size_t>(i)]);
            return sum;
        };
        const std::int64_t own = functional(v);
        for (std::size_t t = 0; t < vertices.size(); ++t) {
            if (t != s && functional(vertices[t]) >= own) return false;
        }
    }
    return true;
}

int affine_rank(const std::vector<LatticeMatrixPoint>& points) {
    if (points.empty()) return -1;
    return affine_rank_capped(points, static_cast<int>(points.front().entries.size()));
}

std::vector<FacetFunctional> facet_enumerate(int n) {
    guard(n, kMaxVertexN);
    if (n < 2) throw PreconditionError("facet_enumerate needs n >= 2");
    const auto vertices = permutation_vertices(n);
    const int dim = affine_rank_capped(vertices, (n - 1) * (n - 1));
    std::map<Row, std::size_t> seen;
    std::vector<FacetFunctional> facets;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Row values;
            values.reserve(vertices.size());
            for (const auto& v : vertices) values.push_back(v(i, j));
            if (const auto it = seen.find(values); it != seen.end()) {
                facets[it->second].merged.emplace_back(i, j);
                continue;
            }
            std::vector<LatticeMatrixPoint> on_facet;
            for (const auto& v : vertices) {
                if (v(i, j) == -1) on_facet.push_back(v);
            }
            if (on_facet.empty() || affine_rank_capped(on_facet, dim - 1) != dim - 1) continue;
            seen.emplace(std::move(values), facets.size());
            facets.push_back({i, j, {{i, j}}, static_cast<int>(on_facet.size())});
        }
    }
    return facets;
}

ReflexiveCertificate reflexive_check(int n) {
    guard(n, kMaxVertexN);
    ReflexiveCertificate cert;
    cert.facets = facet_enumerate(n);
    const auto vertices = permutation_vertices(n);
    cert.reflexive = !cert.facets.empty();
    std::vector<std::int64_t> minima(cert.facets.size(), INT64_MAX);
    for (const auto& v : vertices) {
        std::vector<std::int64_t> row;
        for (std::size_t f = 0; f < cert.facets.size(); ++f) {
            const auto value = v(cert.facets[f].row, cert.facets[f].col);
            row.push_back(value);
            minima[f] = std::min(minima[f], value);
        }
        cert.table.push_back(std::move(row));
    }
    // Functionals are integer on the lattice; each must reach exactly -1,
    // and the origin (value 0) is interior.
    for (const auto m : minima) cert.reflexive = cert.reflexive && m == -1;
    return cert;
}

std::vector<LatticeMatrixPoint> lattice_points_enumerate(int n) {
    guard(n, kMaxLatticeN);
    std::set<LatticeMatrixPoint> found;
    for (int k = 0; k < n; ++k) {
        // Entries lambda in k/n + Z inside [0, 1], i.e. l = k - 1 + n m in [-1, n - 1].
        std::vector<std::int64_t> values;
        for (std::int64_t l = k - 1; l <= n - 1; l += n) {
            if (l >= -1) values.push_back(l);
        }
        combine_rows(n, zero_sum_rows(n, values), [&](const Row& entries) { found.insert({n, entries}); });
    }
    return {found.begin(), found.end()};
}

std::vector<LatticeMatrixPoint> lattice_points_brute_force(int n) {
    guard(n, kMaxBruteForceN);
    std::vector<std::int64_t> grid;
    for (std::int64_t l = -1; l <= n - 1; ++l) grid.push_back(l);
    std::set<LatticeMatrixPoint> found;
    combine_rows(n, zero_sum_rows(n, grid), [&](const Row& entries) {
        if (in_lattice(n, entries)) found.insert({n, entries});
    });
    return {found.begin(), found.end()};
}

bool terminal_check(int n, const std::vector<LatticeMatrixPoint>& lattice_points) {
    std::set<LatticeMatrixPoint> expected;
    for (auto& v : permutation_vertices(n)) expected.insert(std::move(v));
    expected.insert({n, Row(static_cast<std::size_t>(n * n), 0)});
    const std::set<LatticeMatrixPoint> actual(lattice_points.begin(), lattice_points.end());
    return actual == expected && actual.size() == lattice_points.size();
}

bool terminal_check(int n) {
    guard(n, kMaxLatticeN);
    return terminal_check(n, lattice_points_enumerate(n));
}

NewtonPolytopeReport newton_polytope_of_E(int n) {
    guard(n, kMaxNewtonN);
    // Polynomial in the n^2 variables g_ij: exponent vector -> coefficient.
    using Poly = std::map<Row, std::int64_t>;
    std::map<unsigned, Poly> memo;
    std::function<const Poly&(int, unsigned)> minor = [&](int row, unsigned cols) -> const Poly& {
        if (auto it = memo.find(cols); it != memo.end()) return it->second;
        Poly result;
        if (row == n) {
            result[Row(static_cast<std::size_t>(n * n), 0)] = 1;
        } else {
            int position = 0;
            for (int c = 0; c < n; ++c) {
                if (!(cols & (1u << c))) continue;
                const std::int64_t sign = position % 2 == 0 ? 1 : -1;
                ++position;
                for (const auto& [exp, coeff] : minor(row + 1, cols & ~(1u << c))) {
                    Row e = exp;
                    ++e[static_cast<std::size_t>(row * n + c)];
                    result[e] += sign * coeff;
                }
            }
        }
        return memo.emplace(cols, std::move(result)).first->second;
    };
    const Poly& det = minor(0, (1u << n) - 1);

    NewtonPolytopeReport report;
    std::set<LatticeMatrixPoint> exponents;
    bool signs_ok = true;
    for (const auto& [exp, coeff] : det) {
        if (coeff == 0) continue;
        LatticeMatrixPoint l{n, Row(exp.size())};
        for (std::size_t k = 0; k < exp.size(); ++k) l.entries[k] = n * exp[k] - 1;
        std::vector<int> perm(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (exp[static_cast<std::size_t>(i * n + j)] == 1) perm[static_cast<std::size_t>(i)] = j;
            }
        }
        const int sign = coeff > 0 ? 1 : -1;
        if (std::abs(coeff) != 1 || std::find(perm.begin(), perm.end(), -1) != perm.end() ||
            permutation_sign(perm) != sign) {
            signs_ok = false;
        }
        exponents.insert(l);
        report.monomials.push_back({sign, std::move(l)});
    }
    const auto vertices = permutation_vertices(n);
    const std::set<LatticeMatrixPoint> vertex_set(vertices.begin(), vertices.end());
    report.matches_vertices = signs_ok && exponents == vertex_set && report.monomials.size() == vertices.size();
    return report;
}

std::int64_t lattice_index(int n) {
    std::int64_t index = 1;
    const int m = (n - 1) * (n - 1);
    for (int i = 0; i + 1 < m; ++i) index *= n;
    return index;
}

ToricIdentification toric_identification(int n) {
    ToricIdentification out;
    if (n == 2) {
        out.claim = "P1";
        const auto vertices = permutation_vertices(2);
        std::set<std::int64_t> coords;
        for (const auto& v : vertices) coords.insert(block_coordinates(v).front());
        const auto points = lattice_points_enumerate(2);
        out.certified = lattice_index(2) == 1 && coords == std::set<std::int64_t>{-1, 1} && points.size() == 3;
        out.detail = "vertices at -1 and 1 in a rank-1 lattice, 3 lattice points";
        return out;
    }
    if (n != 3) {
        out.detail = "no identification is checked for this n";
        return out;
    }
    out.claim = "P2xP2";
    const auto perms = permutations(3);
    std::vector<Row> block;
    for (const auto& p : perms) block.push_back(block_coordinates(permutation_point(p)));
    auto zero_sum = [&](const std::vector<std::size_t>& idx) {
        for (std::size_t k = 0; k < block.front().size(); ++k) {
            std::int64_t s = 0;
            for (const auto i : idx) s += block[i][k];
            if (s != 0) return false;
        }
        return true;
    };
    // Search all splits of the 6 vertices into two triangles.
    for (unsigned mask = 0; mask < (1u << 6); ++mask) {
        if (std::popcount(mask) != 3 || !(mask & 1u)) continue;
        std::vector<std::size_t> first, second;
        for (std::size_t i = 0; i < 6; ++i) ((mask >> i) & 1u ? first : second).push_back(i);
        if (!zero_sum(first) || !zero_sum(second)) continue;
        const std::vector<Row> basis{block[first[0]], block[first[1]], block[second[0]], block[second[1]]};
        const std::int64_t d = det_exact(basis);
        if (std::abs(d) == lattice_index(3)) {
            out.certified = true;
            std::string parity = permutation_sign(perms[first[0]]) == permutation_sign(perms[first[1]]) &&
                                         permutation_sign(perms[first[1]]) == permutation_sign(perms[first[2]])
                                     ? "even/odd permutations"
                                     : "mixed parity";
            out.detail = "free sum of two unimodular triangles (" + parity + "), basis determinant " +
                         std::to_string(d) + " = index of N";
            return out;
        }
    }
    out.detail = "no split into two unimodular zero-sum triangles found";
    return out;
}

PolytopeReport polytope_report(int n) {
    guard(n, kMaxVertexN);
    PolytopeReport r;
    r.n = n;
    const auto vertices = permutation_vertices(n);
    r.vertex_count = static_cast<int>(vertices.size());
    r.dimension = n == 1 ? 0 : affine_rank_capped(vertices, (n - 1) * (n - 1));
    if (n >= 2) {
        const auto cert = reflexive_check(n);
        r.facet_count = static_cast<int>(cert.facets.size());
        r.reflexive = cert.reflexive;
    }
    if (n <= kMaxLatticeN) {
        const auto points = lattice_points_enumerate(n);
        r.lattice_point_count = static_cast<int>(points.size());
        r.terminal = terminal_check(n, points);
    }
    return r;
}

}  // namespace unbiased::birkhoff
