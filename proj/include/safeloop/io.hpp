#ifndef SAFELOOP_IO_HPP_
#define SAFELOOP_IO_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "safeloop/synthesis.hpp"
#include "safeloop/validate.hpp"

namespace safeloop
{

using Json = nlohmann::json;

/// Schema or field-level problem in a user-supplied configuration; the
/// message names the offending field.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// matrices serialize as nested arrays, row-major
Json mat_to_json(const Mat& M);
Mat mat_from_json(const Json& j, const std::string& field);
Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& field);

Json to_json(const ConZonotope& C);
ConZonotope czono_from_json(const Json& j, const std::string& field);
Json to_json(const ConMatrixZonotope& M);
Json to_json(const Polytope& P);
Polytope polytope_from_json(const Json& j, const std::string& field);

Json to_json(const DataView& d);
DataView dataview_from_json(const Json& j, const std::string& field);

Json to_json(const SynthesisResult& r);
Json to_json(const ValidationReport& r);

const char* to_string(BoundMode m);
BoundMode bound_mode_from_string(const std::string& s);

struct SweepSpec
{
    std::string kind;  // "lambda" or "b"
    double b_max = 0.2;
    double tol = 1e-3;
};

struct ExperimentConfig
{
    int version = 1;
    LinearSystem system;
    Vec x0;
    int T = 0;
    double u_range = 1.0;
    std::uint64_t seed = 1;
    std::optional<Mat> prior_lower, prior_upper;  // entrywise bounds on [A B]
    std::optional<double> disturbance_level;      // box [-b,b]^n
    std::optional<ConZonotope> disturbance_set;   // explicit alternative
    std::optional<Polytope> safe_poly;
    std::optional<ConZonotope> safe_cz;
    std::string method = "polytope";  // or "czono"
    std::optional<double> lambda;
    std::optional<SweepSpec> sweep;
    BoundMode bound_mode = BoundMode::sound;
    std::string out_dir = "out";
    std::vector<std::string> formats = {"json", "csv"};

    ConZonotope disturbance() const;
    ConZonotope disturbance_at(double b) const;  ///< box at an overridden level
    PriorKnowledge prior() const;
    SynthesisSpec to_spec(const DataView& data) const;
};

ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

/// One matrix as CSV, one row per line.
std::string matrix_csv(const Mat& M);

}  // namespace safeloop

#endif
