#pragma once

#include <string>

#include <json.hpp>

#include "unbiased/birkhoff.hpp"
#include "unbiased/errors.hpp"
#include "unbiased/linalg.hpp"
#include "unbiased/potential.hpp"
#include "unbiased/solver.hpp"
#include "unbiased/symplectic.hpp"
#include "unbiased/verify.hpp"

namespace unbiased::io {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input document.
class FormatError : public Error {
public:
    using Error::Error;
};

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const Json& doc);

/// { "n", "re", "im" } with row-major entries.
Json to_json(const ComplexSquareMatrix& m);
ComplexSquareMatrix matrix_from_json(const Json& doc);

/// { "k", "n", "re", "im" }.
Json to_json(const WeightMatrix& w);
/// Accepts the object form or the string "uniform:n".
WeightMatrix weights_from_json(const Json& doc);
/// "uniform:n" or a path to a weight file.
WeightMatrix parse_weights_spec(const std::string& spec);

Json to_json(const CheckReport& r);
Json to_json(const DeviationReport& r);
Json to_json(const SpectrumReport& s);
Json to_json(const CriticalPointRecord& r);
Json to_json(const FamilyReport& r);
Json to_json(const birkhoff::PolytopeReport& r);
Json to_json(const birkhoff::LatticeMatrixPoint& p);

/// Slice point and basin count of a stored record; the rest is recomputed.
struct StoredRecord {
    GaugeSlicePoint slice_point;
    int basin_count = 1;
};

StoredRecord record_from_json(const Json& doc);

}  // namespace unbiased::io
