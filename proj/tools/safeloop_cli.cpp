// Command-line driver: generate data, synthesize controllers, sweep
// feasibility frontiers, roll out trajectories, validate results.
//
// Exit codes: 0 success/feasible, 10 infeasible, 20 validation-audit failure,
// 30 configuration error, 40 numerical failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "safeloop/io.hpp"
#include "safeloop/synthesis.hpp"
#include "safeloop/validate.hpp"

namespace fs = std::filesystem;
using namespace safeloop;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 10;
constexpr int kExitAuditFail = 20;
constexpr int kExitConfig = 30;
constexpr int kExitNumerical = 40;

struct CommonOpts
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    double tol = 1e-7;
    std::optional<std::string> bound_mode;
    int jobs = 1;
    bool use_prior = true;
};

ExperimentConfig load(const CommonOpts& opts)
{
    ExperimentConfig cfg = load_config(opts.config_path);
    if (opts.seed)
    {
        cfg.seed = *opts.seed;
    }
    if (opts.out_dir)
    {
        cfg.out_dir = *opts.out_dir;
    }
    else if (const char* env = std::getenv("SAFELOOP_OUT_DIR"))
    {
        cfg.out_dir = env;
    }
    if (opts.bound_mode)
    {
        cfg.bound_mode = bound_mode_from_string(*opts.bound_mode);
    }
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name)
{
    return (fs::path(cfg.out_dir) / name).string();
}

DataSet generate_dataset(const ExperimentConfig& cfg)
{
    return excite(cfg.system, cfg.x0, cfg.T, cfg.u_range, cfg.disturbance(), cfg.seed);
}

void write_dataset(const ExperimentConfig& cfg, const DataSet& ds)
{
    write_json_file(out_path(cfg, "dataset_public.json"), to_json(ds.view()));
    // the sealed part: disturbance realization and true system, for audits only
    Json hidden{{"W0", mat_to_json(ds.W0)},
                {"X", mat_to_json(ds.X)},
                {"A_true", mat_to_json(cfg.system.A)},
                {"B_true", mat_to_json(cfg.system.B)}};
    write_json_file(out_path(cfg, "dataset_hidden.json"), hidden);
    if (std::find(cfg.formats.begin(), cfg.formats.end(), "csv") != cfg.formats.end())
    {
        write_text_file(out_path(cfg, "U0.csv"), matrix_csv(ds.U0));
        write_text_file(out_path(cfg, "X.csv"), matrix_csv(ds.X));
    }
}

DataView load_dataview(const ExperimentConfig& cfg)
{
    const std::string path = out_path(cfg, "dataset_public.json");
    if (!fs::exists(path))
    {
        throw ConfigError("no dataset at '" + path + "'; run the generate command first");
    }
    return dataview_from_json(read_json_file(path), "dataset_public");
}

/// Sampling audit against the constrained-zonotope safe set, used when no
/// polytope form is configured.
ValidationReport audit_czono(const LinearSystem& sys, const Mat& K, const ConZonotope& safe,
                             const ConZonotope& Zw, double lambda, long N, std::uint64_t seed)
{
    ValidationReport rep;
    rep.method = "contractive-czono-sampled";
    rep.lambda = lambda;
    rep.worst_margin = kInf;
    rep.enumeration_skipped = true;
    const Mat Acl = sys.A + sys.B * K;
    const ConZonotope scaled = scale_level_set(safe, lambda);
    Rng rng(seed);
    MemberSampler xs(safe);
    MemberSampler ws(Zw);
    for (long i = 0; i < N; ++i)
    {
        const Vec xplus = Acl * xs.next(rng) + ws.next(rng);
        const Membership m = member_point(scaled, xplus, 1e-8);
        ++rep.tested;
        rep.worst_margin = std::min(rep.worst_margin, -m.residual);
        if (!m.member)
        {
            ++rep.violations;
        }
    }
    return rep;
}

ValidationReport run_audit(const ExperimentConfig& cfg, const SynthesisResult& res)
{
    if (cfg.safe_poly)
    {
        return check_contractive(cfg.system, res.K, *cfg.safe_poly, cfg.disturbance(),
                                 res.lambda, 10000, cfg.seed + 77);
    }
    return audit_czono(cfg.system, res.K, *cfg.safe_cz, cfg.disturbance(), res.lambda, 10000,
                       cfg.seed + 77);
}

int cmd_generate(const CommonOpts& opts)
{
    const ExperimentConfig cfg = load(opts);
    const DataSet ds = generate_dataset(cfg);
    write_dataset(cfg, ds);
    std::cout << "dataset written to " << cfg.out_dir << " (T=" << ds.T()
              << ", X0 full row rank: " << (row_rank_full(ds.X0()) ? "yes" : "no") << ")\n";
    return kExitOk;
}

int cmd_synthesize(const CommonOpts& opts)
{
    const ExperimentConfig cfg = load(opts);
    const DataView data = load_dataview(cfg);
    SynthesisSpec spec = cfg.to_spec(data);
    spec.use_prior = opts.use_prior;
    spec.tol = opts.tol;
    const SynthesisResult res = synthesize(spec);

    Json j = to_json(res);
    j["use_prior"] = opts.use_prior;
    int code = kExitOk;
    if (res.status == SynthesisStatus::infeasible)
    {
        code = kExitInfeasible;
        std::cout << "no certificate found at lambda=" << res.lambda << "\n";
    }
    else if (res.status == SynthesisStatus::numerical_failure)
    {
        code = kExitNumerical;
        std::cout << "numerical failure; no certificate\n";
    }
    else
    {
        const ValidationReport audit = run_audit(cfg, res);
        j["audit"] = to_json(audit);
        if (!audit.pass())
        {
            code = kExitAuditFail;
            std::cout << "feasible result FAILED the posterior audit ("
                      << audit.violations << " violations)\n";
        }
        else
        {
            std::cout << "feasible at lambda=" << res.lambda
                      << ", audit passed (worst margin " << audit.worst_margin << ")\n";
        }
    }
    write_json_file(out_path(cfg, "result.json"), j);
    return code;
}

int cmd_sweep(const CommonOpts& opts, std::string sweep_kind)
{
    const ExperimentConfig cfg = load(opts);
    if (sweep_kind.empty())
    {
        if (!cfg.sweep)
        {
            throw ConfigError("field 'synthesis.sweep' missing and no --sweep flag given");
        }
        sweep_kind = cfg.sweep->kind;
    }
    const double tol = cfg.sweep ? cfg.sweep->tol : 1e-3;
    const double b_max = cfg.sweep ? cfg.sweep->b_max : 0.2;
    const double lambda = cfg.lambda.value_or(0.95);

    std::ostringstream csv;
    csv << "mode," << (sweep_kind == "lambda" ? "lambda" : "b") << ",status\n";
    std::mutex csv_mutex;
    Json summary;

    auto probe = [&](bool with_prior, double value, const DataView& data,
                     const ConZonotope& Zw) {
        SynthesisSpec spec = cfg.to_spec(data);
        spec.use_prior = with_prior;
        spec.prior.Zw = Zw;
        spec.tol = opts.tol;
        if (sweep_kind == "lambda")
        {
            spec.lambda = value;
        }
        const SynthesisResult r = synthesize(spec);
        {
            std::lock_guard<std::mutex> lock(csv_mutex);
            csv << (with_prior ? "with_prior" : "no_prior") << ',' << value << ','
                << to_string(r.status) << '\n';
        }
        return r.status == SynthesisStatus::feasible;
    };

    auto run_mode = [&](bool with_prior) -> std::optional<double> {
        if (sweep_kind == "lambda")
        {
            const DataSet ds = generate_dataset(cfg);
            const DataView data = ds.view();
            const ConZonotope Zw = cfg.disturbance();
            double hi = 1.0 - tol;
            if (!probe(with_prior, hi, data, Zw))
            {
                return std::nullopt;
            }
            double lo = 0.0;
            while (hi - lo > tol)
            {
                const double mid = 0.5 * (lo + hi);
                (probe(with_prior, mid, data, Zw) ? hi : lo) = mid;
            }
            return hi;
        }
        // b sweep: data are regenerated at each level so the recorded noise
        // matches the assumed bound
        auto feasible_at = [&](double b) {
            ExperimentConfig at = cfg;
            at.disturbance_level = b;
            at.disturbance_set.reset();
            at.lambda = lambda;
            const DataSet ds = generate_dataset(at);
            return probe(with_prior, b, ds.view(), at.disturbance());
        };
        if (feasible_at(b_max))
        {
            return b_max;
        }
        if (!feasible_at(0.0))
        {
            return std::nullopt;
        }
        double lo = 0.0, hi = b_max;
        while (hi - lo > tol)
        {
            const double mid = 0.5 * (lo + hi);
            (feasible_at(mid) ? lo : hi) = mid;
        }
        return lo;
    };

    std::optional<double> frontier_with, frontier_without;
    if (opts.jobs > 1)
    {
        auto fw = std::async(std::launch::async, run_mode, true);
        frontier_without = run_mode(false);
        frontier_with = fw.get();
    }
    else
    {
        frontier_with = run_mode(true);
        frontier_without = run_mode(false);
    }

    summary["sweep"] = sweep_kind;
    summary["with_prior"] = frontier_with ? Json(*frontier_with) : Json();
    summary["no_prior"] = frontier_without ? Json(*frontier_without) : Json();
    write_text_file(out_path(cfg, "sweep.csv"), csv.str());
    write_json_file(out_path(cfg, "sweep_summary.json"), summary);
    std::cout << "frontier with prior: "
              << (frontier_with ? std::to_string(*frontier_with) : "none")
              << ", without prior: "
              << (frontier_without ? std::to_string(*frontier_without) : "none") << "\n";
    return kExitOk;
}

int cmd_trajectory(const CommonOpts& opts, const std::string& result_path, int horizon,
                   int n_runs, bool force)
{
    const ExperimentConfig cfg = load(opts);
    const Json rj = read_json_file(result_path);
    if (!rj.contains("status"))
    {
        throw ConfigError("result file lacks a status field");
    }
    if (rj["status"].get<std::string>() != "feasible" && !force)
    {
        throw ConfigError("result is not feasible; pass --force to roll out anyway");
    }
    const Mat K = mat_from_json(rj.at("K"), "result.K");
    const Mat Acl = cfg.system.A + cfg.system.B * K;
    const ConZonotope Zw = cfg.disturbance();

    std::ostringstream csv;
    csv.precision(17);
    csv << "run,t";
    for (Eigen::Index i = 0; i < cfg.system.n(); ++i)
    {
        csv << ",x" << (i + 1);
    }
    csv << ",safe\n";
    Rng rng(cfg.seed + 101);
    MemberSampler ws(Zw);
    for (int run = 0; run < n_runs; ++run)
    {
        Vec x = cfg.x0;
        for (int t = 0; t < horizon; ++t)
        {
            x = Acl * x + ws.next(rng);
            bool safe = true;
            if (cfg.safe_poly)
            {
                safe = ((cfg.safe_poly->H * x - cfg.safe_poly->h).array() <= 1e-9).all();
            }
            else if (cfg.safe_cz)
            {
                safe = member_point(*cfg.safe_cz, x, 1e-7).member;
            }
            csv << run << ',' << t;
            for (Eigen::Index i = 0; i < x.size(); ++i)
            {
                csv << ',' << x(i);
            }
            csv << ',' << (safe ? 1 : 0) << '\n';
        }
    }
    write_text_file(out_path(cfg, "trajectory.csv"), csv.str());
    std::cout << "trajectory CSV written (" << n_runs << " runs x " << horizon << " steps)\n";
    return kExitOk;
}

int cmd_validate(const CommonOpts& opts, const std::string& result_path, int horizon, long N)
{
    const ExperimentConfig cfg = load(opts);
    const Json rj = read_json_file(result_path);
    const Mat K = mat_from_json(rj.at("K"), "result.K");
    const double lambda = rj.value("lambda", cfg.lambda.value_or(0.95));
    Json out;
    bool ok = true;
    if (cfg.safe_poly)
    {
        const ValidationReport c = check_contractive(cfg.system, K, *cfg.safe_poly,
                                                     cfg.disturbance(), lambda, N, cfg.seed + 7);
        const ValidationReport r = check_ris(cfg.system, K, *cfg.safe_poly, cfg.disturbance(),
                                             horizon, std::max(1L, N / 100), cfg.seed + 13);
        out["contractive"] = to_json(c);
        out["ris"] = to_json(r);
        ok = c.pass() && r.pass();
    }
    else
    {
        const ValidationReport c =
            audit_czono(cfg.system, K, *cfg.safe_cz, cfg.disturbance(), lambda, N, cfg.seed + 7);
        out["contractive"] = to_json(c);
        ok = c.pass();
    }
    write_json_file(out_path(cfg, "validation.json"), out);
    std::cout << (ok ? "validation passed\n" : "validation FAILED\n");
    return ok ? kExitOk : kExitAuditFail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Learn provably safe state-feedback controllers from trajectory data"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string sweep_kind;
    std::string result_path;
    int horizon = 50;
    int n_runs = 5;
    long n_samples = 10000;
    bool force = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", opts.config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", opts.seed, "override the config seed");
        cmd->add_option("--out-dir", opts.out_dir, "output directory");
        cmd->add_option("--tol", opts.tol, "solver tolerance");
        cmd->add_option("--bound-mode", opts.bound_mode, "offset bound mode: sound|classic");
        cmd->add_option("--jobs", opts.jobs, "worker count for sweeps");
    };

    CLI::App* gen = app.add_subcommand("generate", "simulate and record an experiment dataset");
    add_common(gen);

    CLI::App* syn = app.add_subcommand("synthesize", "learn a certified controller");
    add_common(syn);
    syn->add_flag("--use-prior,!--no-prior", opts.use_prior, "use the model prior (default on)");

    CLI::App* swp = app.add_subcommand("sweep", "locate feasibility frontiers in lambda or b");
    add_common(swp);
    swp->add_option("--sweep", sweep_kind, "sweep variable: lambda|b");

    CLI::App* trj = app.add_subcommand("trajectory", "closed-loop rollout CSV for plotting");
    add_common(trj);
    trj->add_option("--result", result_path, "result JSON from synthesize")->required();
    trj->add_option("--horizon", horizon, "steps per run");
    trj->add_option("--runs", n_runs, "number of runs");
    trj->add_flag("--force", force, "roll out even without a feasible certificate");

    CLI::App* val = app.add_subcommand("validate", "audit a controller against the true system");
    add_common(val);
    val->add_option("--result", result_path, "result JSON from synthesize")->required();
    val->add_option("--horizon", horizon, "invariance-check horizon");
    val->add_option("--samples", n_samples, "random test pairs");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (gen->parsed())
        {
            return cmd_generate(opts);
        }
        if (syn->parsed())
        {
            return cmd_synthesize(opts);
        }
        if (swp->parsed())
        {
            return cmd_sweep(opts, sweep_kind);
        }
        if (trj->parsed())
        {
            return cmd_trajectory(opts, result_path, horizon, n_runs, force);
        }
        if (val->parsed())
        {
            return cmd_validate(opts, result_path, horizon, n_samples);
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
