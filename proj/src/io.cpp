#include "unbiased/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace unbiased::io {

namespace {

const Json& field(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    return doc.at(key);
}

int positive_int(const Json& doc, const char* key) {
    const Json& v = field(doc, key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw FormatError(std::string("field '") + key + "' must be a positive integer");
    }
    return v.get<int>();
}

std::vector<double> reals(const Json& doc, const char* key, std::size_t expected) {
    const Json& v = field(doc, key);
    if (!v.is_array() || v.size() != expected) {
        throw FormatError(std::string("field '") + key + "' must be an array of " + std::to_string(expected) +
                          " numbers");
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& x : v) {
        if (!x.is_number()) throw FormatError(std::string("field '") + key + "' holds a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << doc.dump(2) << '\n';
}

Json to_json(const ComplexSquareMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (int i = 0; i < m.n(); ++i) {
        for (int j = 0; j < m.n(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return Json{{"n", m.n()}, {"re", re}, {"im", im}};
}

ComplexSquareMatrix matrix_from_json(const Json& doc) {
    const int n = positive_int(doc, "n");
    const auto size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const auto re = reals(doc, "re", size);
    const auto im = reals(doc, "im", size);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(i * n + j);
            m(i, j) = Complex(re[k], im[k]);
        }
    }
    try {
        return ComplexSquareMatrix(std::move(m));
    } catch (const Error& e) {
        throw FormatError(e.what());
    }
}

Json to_json(const WeightMatrix& w) {
    Json re = Json::array();
    Json im = Json::array();
    for (int i = 0; i < w.k(); ++i) {
        for (int j = 0; j < w.n(); ++j) {
            re.push_back(w(i, j).real());
            im.push_back(w(i, j).imag());
        }
    }
    return Json{{"k", w.k()}, {"n", w.n()}, {"re", re}, {"im", im}};
}

WeightMatrix weights_from_json(const Json& doc) {
    if (doc.is_string()) return parse_weights_spec(doc.get<std::string>());
    const int k = positive_int(doc, "k");
    const int n = positive_int(doc, "n");
    const auto size = static_cast<std::size_t>(k) * static_cast<std::size_t>(n);
    const auto re = reals(doc, "re", size);
    const auto im = reals(doc, "im", size);
    Eigen::MatrixXcd m(k, n);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto idx = static_cast<std::size_t>(i * n + j);
            m(i, j) = Complex(re[idx], im[idx]);
        }
    }
    return WeightMatrix(k, n, std::move(m));
}

WeightMatrix parse_weights_spec(const std::string& spec) {
    const std::string prefix = "uniform:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string digits = spec.substr(prefix.size());
        int n = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 1) {
            throw FormatError("bad weight shorthand '" + spec + "'");
        }
        return uniform_weights(n);
    }
    return weights_from_json(read_json_file(spec));
}

Json to_json(const CheckReport& r) {
    Json violations = Json::array();
    for (const auto& v : r.violations) {
        violations.push_back(Json{{"relation", v.relation}, {"indices", v.indices}, {"deviation", v.deviation}});
    }
    return Json{{"passed", r.passed}, {"violations", violations}};
}

Json to_json(const DeviationReport& r) {
    return Json{{"max_deviation", r.max_deviation}, {"trials", r.trials}, {"seed", r.seed}};
}

Json to_json(const SpectrumReport& s) {
    return Json{{"values", s.values}, {"rank", s.rank}, {"nullity", s.nullity}, {"tolerance", s.tolerance_used}};
}

Json to_json(const CriticalPointRecord& r) {
    const auto& p = r.slice_point;
    Json re = Json::array();
    Json im = Json::array();
    for (const Complex z : p.free_entries()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return Json{{"n", p.n()},
                {"slice_point", {{"re", re}, {"im", im}}},
                {"residual", r.residual_norm},
                {"potential_power", complex_json(r.potential_power)},
                {"spectrum", to_json(r.hessian_spectrum)},
                {"nullity", r.nullity},
                {"basin_count", r.basin_count},
                {"iterations", r.iterations},
                {"canonical_key", r.canonical_key.values}};
}

Json to_json(const FamilyReport& r) {
    Json dirs = Json::array();
    for (const auto& d : r.directions) {
        dirs.push_back(Json{{"direction", d.direction},
                            {"distance", d.distance},
                            {"residual", d.residual},
                            {"traced", d.traced}});
    }
    return Json{{"nullity", r.nullity},
                {"traced_directions", r.traced_directions},
                {"status", r.status},
                {"isotropy_max", r.isotropy_max},
                {"directions", dirs}};
}

Json to_json(const birkhoff::LatticeMatrixPoint& p) {
    Json rows = Json::array();
    for (int i = 0; i < p.n; ++i) {
        Json row = Json::array();
        for (int j = 0; j < p.n; ++j) row.push_back(p(i, j));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const birkhoff::PolytopeReport& r) {
    Json doc{{"n", r.n},
             {"vertex_count", r.vertex_count},
             {"facet_count", r.facet_count},
             {"dimension", r.dimension},
             {"reflexive", r.reflexive}};
    doc["lattice_point_count"] = r.lattice_point_count ? Json(*r.lattice_point_count) : Json(nullptr);
    doc["terminal"] = r.terminal ? Json(*r.terminal) : Json(nullptr);
    return doc;
}

StoredRecord record_from_json(const Json& doc) {
    const int n = positive_int(doc, "n");
    if (n < 2) throw FormatError("record needs n >= 2");
    const auto count = static_cast<std::size_t>((n - 1) * (n - 1));
    const Json& slice = field(doc, "slice_point");
    const auto re = reals(slice, "re", count);
    const auto im = reals(slice, "im", count);
    std::vector<Complex> free(count);
    for (std::size_t k = 0; k < count; ++k) free[k] = Complex(re[k], im[k]);
    int basins = 1;
    if (doc.contains("basin_count")) basins = positive_int(doc, "basin_count");
    try {
        return {GaugeSlicePoint(n, std::move(free)), basins};
    } catch (const Error& e) {
        throw FormatError(e.what());
    }
}

}  // namespace unbiased::io
