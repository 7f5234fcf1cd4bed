#include "safeloop/io.hpp"

#include <fstream>
#include <sstream>

namespace safeloop
{

Json mat_to_json(const Mat& M)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
        {
            row.push_back(M(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j, const std::string& field)
{
    if (!j.is_array())
    {
        throw ConfigError("field '" + field + "' must be a nested array (matrix)");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Mat M;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const Json& row = j[static_cast<size_t>(i)];
        if (!row.is_array())
        {
            throw ConfigError("field '" + field + "' must be a nested array (matrix)");
        }
        if (cols < 0)
        {
            cols = static_cast<Eigen::Index>(row.size());
            M.resize(rows, cols);
        }
        if (static_cast<Eigen::Index>(row.size()) != cols)
        {
            throw ConfigError("field '" + field + "' has ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            const Json& v = row[static_cast<size_t>(c)];
            if (!v.is_number())
            {
                throw ConfigError("field '" + field + "' contains a non-numeric entry");
            }
            M(i, c) = v.get<double>();
        }
    }
    if (rows == 0)
    {
        M.resize(0, 0);
    }
    return M;
}

Json vec_to_json(const Vec& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        a.push_back(v(i));
    }
    return a;
}

Vec vec_from_json(const Json& j, const std::string& field)
{
    if (!j.is_array())
    {
        throw ConfigError("field '" + field + "' must be an array (vector)");
    }
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        const Json& e = j[static_cast<size_t>(i)];
        if (!e.is_number())
        {
            throw ConfigError("field '" + field + "' contains a non-numeric entry");
        }
        v(i) = e.get<double>();
    }
    return v;
}

Json to_json(const ConZonotope& C)
{
    return Json{{"center", vec_to_json(C.c)},
                {"generators", mat_to_json(C.G)},
                {"A", mat_to_json(C.A)},
                {"b", vec_to_json(C.b)},
                {"dim", C.dim()},
                {"num_generators", C.num_gens()},
                {"num_constraints", C.num_cons()}};
}

ConZonotope czono_from_json(const Json& j, const std::string& field)
{
    if (!j.is_object() || !j.contains("center") || !j.contains("generators"))
    {
        throw ConfigError("field '" + field + "' must be an object with center/generators");
    }
    const Vec c = vec_from_json(j["center"], field + ".center");
    Mat G = mat_from_json(j["generators"], field + ".generators");
    if (G.size() == 0)
    {
        G.resize(c.size(), 0);
    }
    Mat A;
    Vec b;
    if (j.contains("A") && j.contains("b"))
    {
        A = mat_from_json(j["A"], field + ".A");
        b = vec_from_json(j["b"], field + ".b");
        if (A.size() == 0)
        {
            A.resize(0, G.cols());
            b.resize(0);
        }
    }
    else
    {
        A.resize(0, G.cols());
        b.resize(0);
    }
    try
    {
        return ConZonotope(c, G, A, b);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("field '" + field + "': " + e.what());
    }
}

Json to_json(const ConMatrixZonotope& M)
{
    Json gens = Json::array();
    for (const auto& Gi : M.G)
    {
        gens.push_back(mat_to_json(Gi));
    }
    Json cons = Json::array();
    for (const auto& Ai : M.Ac)
    {
        cons.push_back(mat_to_json(Ai));
    }
    return Json{{"center", mat_to_json(M.C)},
                {"generators", gens},
                {"A_blocks", cons},
                {"B", mat_to_json(M.Bc)},
                {"rows", M.rows()},
                {"cols", M.cols()},
                {"num_generators", M.num_gens()}};
}

Json to_json(const Polytope& P)
{
    return Json{{"H", mat_to_json(P.H)}, {"h", vec_to_json(P.h)}};
}

Polytope polytope_from_json(const Json& j, const std::string& field)
{
    if (!j.is_object() || !j.contains("H") || !j.contains("h"))
    {
        throw ConfigError("field '" + field + "' must be an object with H and h");
    }
    Polytope P;
    P.H = mat_from_json(j["H"], field + ".H");
    P.h = vec_from_json(j["h"], field + ".h");
    if (P.H.rows() != P.h.size())
    {
        throw ConfigError("field '" + field + "': H and h row counts differ");
    }
    return P;
}

Json to_json(const DataView& d)
{
    return Json{{"U0", mat_to_json(d.U0)}, {"X0", mat_to_json(d.X0)}, {"X1", mat_to_json(d.X1)}};
}

DataView dataview_from_json(const Json& j, const std::string& field)
{
    for (const char* key : {"U0", "X0", "X1"})
    {
        if (!j.contains(key))
        {
            throw ConfigError("field '" + field + "." + key + "' missing");
        }
    }
    DataView d;
    d.U0 = mat_from_json(j["U0"], field + ".U0");
    d.X0 = mat_from_json(j["X0"], field + ".X0");
    d.X1 = mat_from_json(j["X1"], field + ".X1");
    if (d.X0.cols() != d.U0.cols() || d.X1.cols() != d.U0.cols() || d.X1.rows() != d.X0.rows())
    {
        throw ConfigError("field '" + field + "': U0/X0/X1 shapes disagree");
    }
    return d;
}

Json to_json(const SynthesisResult& r)
{
    Json j{{"status", to_string(r.status)},
           {"lambda", r.lambda},
           {"generator_count", r.generator_count},
           {"residual", r.residual},
           {"solve_seconds", r.solve_seconds}};
    if (r.status == SynthesisStatus::feasible)
    {
        j["K"] = mat_to_json(r.K);
        j["G_K"] = mat_to_json(r.Gk);
        if (r.P.size() > 0)
        {
            j["P"] = mat_to_json(r.P);
            j["rho"] = r.rho;
        }
        if (r.cert)
        {
            j["certificate"] = Json{{"Gamma", mat_to_json(r.cert->Gamma)},
                                    {"L", vec_to_json(r.cert->L)},
                                    {"P", mat_to_json(r.cert->P)}};
        }
    }
    if (r.y.size() > 0)
    {
        j["y"] = vec_to_json(r.y);
        j["l"] = vec_to_json(r.l);
        j["l_fallback"] = r.y_l_fallback;
    }
    return j;
}

Json to_json(const ValidationReport& r)
{
    return Json{{"method", r.method},
                {"lambda", r.lambda},
                {"tested", r.tested},
                {"violations", r.violations},
                {"worst_margin", r.worst_margin},
                {"runtime_seconds", r.runtime_seconds},
                {"enumeration_skipped", r.enumeration_skipped},
                {"pass", r.pass()}};
}

const char* to_string(BoundMode m)
{
    return m == BoundMode::sound ? "sound" : "classic";
}

BoundMode bound_mode_from_string(const std::string& s)
{
    if (s == "sound")
    {
        return BoundMode::sound;
    }
    if (s == "classic")
    {
        return BoundMode::classic;
    }
    throw ConfigError("field 'synthesis.bound_mode' must be 'sound' or 'classic'");
}

ConZonotope ExperimentConfig::disturbance() const
{
    if (disturbance_set)
    {
        return *disturbance_set;
    }
    return disturbance_at(disturbance_level.value_or(0.0));
}

ConZonotope ExperimentConfig::disturbance_at(double b) const
{
    const Eigen::Index n = system.n();
    const Vec lo = Vec::Constant(n, -b);
    const Vec hi = Vec::Constant(n, b);
    return to_constrained(from_box(lo, hi));
}

PriorKnowledge ExperimentConfig::prior() const
{
    PriorKnowledge pr;
    pr.Zw = disturbance();
    if (prior_lower && prior_upper)
    {
        pr.model = to_constrained(interval_matrix_zonotope(*prior_lower, *prior_upper));
    }
    return pr;
}

SynthesisSpec ExperimentConfig::to_spec(const DataView& data) const
{
    SynthesisSpec spec;
    spec.data = data;
    spec.prior = prior();
    spec.safe_poly = safe_poly;
    spec.safe_cz = safe_cz;
    if (method == "polytope")
    {
        spec.safe_cz.reset();
        if (!spec.safe_poly)
        {
            throw ConfigError("field 'safe_set.polytope' required for method=polytope");
        }
    }
    else
    {
        spec.safe_poly.reset();
        if (!spec.safe_cz)
        {
            throw ConfigError("field 'safe_set.czonotope' required for method=czono");
        }
    }
    spec.lambda = lambda.value_or(0.95);
    spec.bound_mode = bound_mode;
    return spec;
}

namespace
{
const Json& require(const Json& j, const char* key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw ConfigError("field '" + path + "' missing");
    }
    return j[key];
}
}  // namespace

ExperimentConfig config_from_json(const Json& j)
{
    ExperimentConfig c;
    if (j.contains("version"))
    {
        c.version = j["version"].get<int>();
        if (c.version != 1)
        {
            throw ConfigError("field 'version' must be 1");
        }
    }
    const Json& sys = require(j, "system", "system");
    c.system.A = mat_from_json(require(sys, "A_true", "system.A_true"), "system.A_true");
    c.system.B = mat_from_json(require(sys, "B_true", "system.B_true"), "system.B_true");
    if (c.system.B.rows() != c.system.A.rows() || c.system.A.rows() != c.system.A.cols())
    {
        throw ConfigError("field 'system': A_true must be square and match B_true rows");
    }
    c.x0 = vec_from_json(require(sys, "x0", "system.x0"), "system.x0");
    if (c.x0.size() != c.system.n())
    {
        throw ConfigError("field 'system.x0' has the wrong length");
    }

    const Json& data = require(j, "data", "data");
    c.T = require(data, "T", "data.T").get<int>();
    if (c.T < c.system.n() + 1)
    {
        throw ConfigError("field 'data.T' must be at least n+1");
    }
    c.u_range = require(data, "u_range", "data.u_range").get<double>();
    c.seed = require(data, "seed", "data.seed").get<std::uint64_t>();

    const Json& prior = require(j, "prior", "prior");
    if (!(prior.is_string() && prior.get<std::string>() == "none"))
    {
        c.prior_lower = mat_from_json(require(prior, "lower", "prior.lower"), "prior.lower");
        c.prior_upper = mat_from_json(require(prior, "upper", "prior.upper"), "prior.upper");
        const Eigen::Index n = c.system.n(), m = c.system.m();
        if (c.prior_lower->rows() != n || c.prior_lower->cols() != n + m ||
            c.prior_upper->rows() != n || c.prior_upper->cols() != n + m)
        {
            throw ConfigError("field 'prior': bounds must be n x (n+m)");
        }
    }

    const Json& dist = require(j, "disturbance", "disturbance");
    const std::string family = require(dist, "family", "disturbance.family").get<std::string>();
    if (family == "box")
    {
        c.disturbance_level = require(dist, "b", "disturbance.b").get<double>();
        if (*c.disturbance_level < 0.0)
        {
            throw ConfigError("field 'disturbance.b' must be nonnegative");
        }
    }
    else if (family == "czonotope")
    {
        c.disturbance_set =
            czono_from_json(require(dist, "set", "disturbance.set"), "disturbance.set");
        if (c.disturbance_set->dim() != c.system.n())
        {
            throw ConfigError("field 'disturbance.set' has the wrong dimension");
        }
    }
    else
    {
        throw ConfigError("field 'disturbance.family' must be 'box' or 'czonotope'");
    }

    const Json& safe = require(j, "safe_set", "safe_set");
    if (safe.contains("polytope"))
    {
        c.safe_poly = polytope_from_json(safe["polytope"], "safe_set.polytope");
        if (c.safe_poly->H.cols() != c.system.n())
        {
            throw ConfigError("field 'safe_set.polytope.H' has the wrong column count");
        }
    }
    if (safe.contains("czonotope"))
    {
        c.safe_cz = czono_from_json(safe["czonotope"], "safe_set.czonotope");
        if (c.safe_cz->dim() != c.system.n())
        {
            throw ConfigError("field 'safe_set.czonotope' has the wrong dimension");
        }
    }
    if (!c.safe_poly && !c.safe_cz)
    {
        throw ConfigError("field 'safe_set' needs a polytope or a czonotope");
    }

    const Json& synth = require(j, "synthesis", "synthesis");
    c.method = require(synth, "method", "synthesis.method").get<std::string>();
    if (c.method != "polytope" && c.method != "czono")
    {
        throw ConfigError("field 'synthesis.method' must be 'polytope' or 'czono'");
    }
    if (synth.contains("lambda"))
    {
        c.lambda = synth["lambda"].get<double>();
        if (!(*c.lambda > 0.0 && *c.lambda < 1.0))
        {
            throw ConfigError("field 'synthesis.lambda' must lie in (0,1)");
        }
    }
    if (synth.contains("sweep"))
    {
        SweepSpec sw;
        const Json& swj = synth["sweep"];
        sw.kind = require(swj, "kind", "synthesis.sweep.kind").get<std::string>();
        if (sw.kind != "lambda" && sw.kind != "b")
        {
            throw ConfigError("field 'synthesis.sweep.kind' must be 'lambda' or 'b'");
        }
        if (swj.contains("b_max"))
        {
            sw.b_max = swj["b_max"].get<double>();
        }
        if (swj.contains("tol"))
        {
            sw.tol = swj["tol"].get<double>();
        }
        c.sweep = sw;
    }
    if (synth.contains("bound_mode"))
    {
        c.bound_mode = bound_mode_from_string(synth["bound_mode"].get<std::string>());
    }

    if (j.contains("output"))
    {
        const Json& out = j["output"];
        if (out.contains("directory"))
        {
            c.out_dir = out["directory"].get<std::string>();
        }
        if (out.contains("formats"))
        {
            c.formats = out["formats"].get<std::vector<std::string>>();
        }
    }
    return c;
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open '" + path + "'");
    }
    Json j;
    try
    {
        in >> j;
    }
    catch (const Json::parse_error& e)
    {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

ExperimentConfig load_config(const std::string& path)
{
    return config_from_json(read_json_file(path));
}

void write_json_file(const std::string& path, const Json& j)
{
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

std::string matrix_csv(const Mat& M)
{
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < M.cols(); ++j)
        {
            os << M(i, j);
            if (j + 1 < M.cols())
            {
                os << ',';
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace safeloop
