// Acceptance gate: one criterion per invocation, selected by argv[1].
// Prints a single PASS/FAIL line per criterion and exits nonzero on failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "safeloop/synthesis.hpp"
#include "safeloop/validate.hpp"

using namespace safeloop;

namespace
{

double now_seconds()
{
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Summary
{
    bool pass = true;
    std::string detail;                 // first failure explanation
    std::vector<std::string> statuses;  // compared across reruns
    std::vector<Mat> gains;             // compared across reruns to 1e-9

    void fail(const std::string& why)
    {
        if (pass)
        {
            detail = why;
        }
        pass = false;
    }
    void note_status(const std::string& s) { statuses.push_back(s); }
    void note_gain(const Mat& K) { gains.push_back(K); }
};

Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0)
{
    std::uniform_real_distribution<double> unif(-scale, scale);
    Mat M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        for (Eigen::Index j = 0; j < c; ++j)
        {
            M(i, j) = unif(rng);
        }
    }
    return M;
}

/// Random nonempty constrained zonotope; constraints are anchored at an
/// interior factor point so the set is never accidentally empty.
ConZonotope random_czono(Rng& rng, Eigen::Index n, Eigen::Index s, Eigen::Index q)
{
    ConZonotope C(Vec(random_mat(rng, n, 1, 2.0)), random_mat(rng, n, s));
    if (q > 0)
    {
        C.A = random_mat(rng, q, s);
        C.b = C.A * Vec(0.8 * sample_unit_box(rng, s));
    }
    return C;
}

// ---------------------------------------------------------------- benchmark

LinearSystem benchmark_system()
{
    LinearSystem sys;
    sys.A.resize(2, 2);
    sys.A << 0.8, 0.5, -0.4, 1.2;
    sys.B.resize(2, 1);
    sys.B << 0.0, 1.0;
    return sys;
}

ConMatrixZonotope benchmark_prior_box()
{
    Mat lo(2, 3), hi(2, 3);
    lo << 0.6, 0.35, -0.1, -0.5, 1.0, 0.8;
    hi << 1.0, 0.65, 0.1, -0.3, 1.4, 1.2;
    return to_constrained(interval_matrix_zonotope(lo, hi));
}

ConZonotope box_disturbance(double b, Eigen::Index n)
{
    return to_constrained(from_box(Vec::Constant(n, -b), Vec::Constant(n, b)));
}

/// Symmetric hexagonal safe set adapted to the benchmark: the first state
/// equation is unactuated with row sum 1.3, so no axis-aligned box can be
/// contractive; this set is 0.675-contractive under K = [0, -1.3].
Polytope benchmark_safe_polytope()
{
    Polytope P;
    P.H.resize(6, 2);
    P.H << 1, 0, 0, 1, 4.0 / 3.0, 5.0 / 6.0, -1, 0, 0, -1, -4.0 / 3.0, -5.0 / 6.0;
    P.h = Vec::Ones(6);
    return P;
}

/// The same hexagon in generator form (a centrally symmetric polygon is a
/// zonogon); vertices (1,-0.4), (0.125,1), (-1,1) and their negatives.
ConZonotope benchmark_safe_zonotope()
{
    Mat G(2, 3);
    G << 0, 0.5625, 0.4375, 0.3, 0, -0.7;
    return ConZonotope(Vec::Zero(2), G);
}

SynthesisSpec benchmark_spec(const DataView& data, double b, double lambda, bool use_prior,
                             bool polytope_form)
{
    SynthesisSpec spec;
    spec.data = data;
    spec.prior.model = benchmark_prior_box();
    spec.prior.Zw = box_disturbance(b, 2);
    spec.lambda = lambda;
    if (polytope_form)
    {
        spec.safe_poly = benchmark_safe_polytope();
    }
    else
    {
        spec.safe_cz = benchmark_safe_zonotope();
    }
    return use_prior ? spec : prior_free_variant(spec);
}

// ---------------------------------------------------------------- criterion 1

Summary run_c1()
{
    Summary s;
    Rng rng(1001);
    const double tol = 1e-7;

    // Minkowski sum: exact in both directions through the factor split
    for (int i = 0; i < 1000; ++i)
    {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
        const ConZonotope C1 = random_czono(rng, n, 1 + rng() % 8, rng() % 2);
        const ConZonotope C2 = random_czono(rng, n, 1 + rng() % 8, rng() % 2);
        const ConZonotope S = minkowski_sum(C1, C2);
        const Vec z1 = sample_member(C1, rng), z2 = sample_member(C2, rng);
        if (!member_point(S, z1 + z2, tol).member)
        {
            s.fail("minkowski sum misses a constructed member");
            return s;
        }
    }

    // intersection of matrix sets: membership in both <=> membership in the
    // intersection, exercised from both sides
    for (int i = 0; i < 10; ++i)
    {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 3);
        const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng() % 3);
        const Mat lo1 = random_mat(rng, r, c), wid = random_mat(rng, r, c).cwiseAbs();
        const Mat lo2 = lo1 + 0.3 * wid;
        const ConMatrixZonotope M1 = to_constrained(interval_matrix_zonotope(lo1, lo1 + wid));
        const ConMatrixZonotope M2 =
            to_constrained(interval_matrix_zonotope(lo2, lo2 + 1.2 * wid));
        const ConMatrixZonotope I = intersect(M1, M2);
        for (int k = 0; k < 50; ++k)
        {
            const Mat X = sample_member(I, rng);
            if (!member_matrix(M1, X, tol).member || !member_matrix(M2, X, tol).member)
            {
                s.fail("intersection sample escapes an operand");
                return s;
            }
        }
        for (int k = 0; k < 50; ++k)
        {
            const Mat X = sample_member(M1, rng);
            const bool in_both = member_matrix(M2, X, tol).member;
            if (in_both != member_matrix(I, X, tol).member)
            {
                s.fail("intersection membership disagrees with the operands");
                return s;
            }
        }
    }

    // linear map and matrix-set/vector-set product
    for (int i = 0; i < 1000; ++i)
    {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 3);
        const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng() % 3);
        std::vector<Mat> gens;
        for (Eigen::Index g = 0; g < 1 + static_cast<Eigen::Index>(rng() % 4); ++g)
        {
            gens.push_back(random_mat(rng, r, c));
        }
        const ConMatrixZonotope M(random_mat(rng, r, c), gens);
        const Mat N = random_mat(rng, c, 1 + rng() % 3);
        const Mat X = sample_member(M, rng);
        if (!member_matrix(map(M, N), X * N, tol).member)
        {
            s.fail("map image misses a mapped member");
            return s;
        }
        const ConZonotope Cx = random_czono(rng, c, 1 + rng() % 4, 0);
        const Vec x = sample_member(Cx, rng);
        if (!member_point(product(M, Cx), X * x, 10 * tol).member)
        {
            s.fail("product over-approximation misses a true product point");
            return s;
        }
    }
    return s;
}

// ---------------------------------------------------------------- criterion 2

/// Pair with a containment certificate by construction: the inner set is the
/// outer set pushed through admissible multipliers (|Gamma|_1 + |L| <= 1).
struct CertPair
{
    ConZonotope inner, outer;
};

CertPair certified_pair(Rng& rng)
{
    for (;;)
    {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
        const Eigen::Index s2 = n + static_cast<Eigen::Index>(rng() % 5);
        const Eigen::Index s1 = 1 + static_cast<Eigen::Index>(rng() % 8);
        const Eigen::Index q = rng() % 2;
        ConZonotope outer(Vec(random_mat(rng, n, 1, 2.0)), random_mat(rng, n, s2));
        const Mat Gamma0 = random_mat(rng, s2, s1, 0.25);
        const Vec L0 = Vec(random_mat(rng, s2, 1, 0.2));
        const Vec z_in = 0.9 * sample_unit_box(rng, s1);
        if (q > 0)
        {
            // anchor the constraints at an interior point so both factor sets
            // are nonempty and (Gamma0, -L0, I) certifies the inclusion
            outer.A = random_mat(rng, q, s2);
            outer.b = outer.A * (Gamma0 * z_in + L0);
        }
        ConZonotope inner(Vec(outer.c + outer.G * L0), Mat(outer.G * Gamma0));
        if (q > 0)
        {
            inner.A = outer.A * Gamma0;
            inner.b = outer.A * Gamma0 * z_in;
        }
        if (contains(inner, outer).has_value())
        {
            return {inner, outer};
        }
    }
}

Summary run_c2()
{
    Summary s;
    Rng rng(2002);
    std::vector<CertPair> pairs;
    for (int i = 0; i < 100; ++i)
    {
        pairs.push_back(certified_pair(rng));
    }
    const unsigned workers = std::max(2u, std::thread::hardware_concurrency());
    std::vector<std::future<int>> tasks;
    for (unsigned w = 0; w < workers; ++w)
    {
        tasks.push_back(std::async(std::launch::async,
                                   [&pairs, w, workers]
                                   {
                                       int bad = 0;
                                       for (size_t i = w; i < pairs.size(); i += workers)
                                       {
                                           const OracleOutcome out = oracle_containment(
                                               pairs[i].inner, pairs[i].outer, 10000,
                                               3000 + static_cast<std::uint64_t>(i));
                                           if (!out.certificate_consistent)
                                           {
                                               ++bad;
                                           }
                                       }
                                       return bad;
                                   }));
    }
    int bad = 0;
    for (auto& t : tasks)
    {
        bad += t.get();
    }
    if (bad > 0)
    {
        s.fail(std::to_string(bad) + " certified pairs produced counterexamples");
    }
    return s;
}

// ---------------------------------------------------------------- criterion 3

Mat random_valid_gk(const Mat& X0, Rng& rng)
{
    const Mat Gk0 = canonical_gk(X0);
    Eigen::FullPivLU<Mat> lu((Mat(X0)));
    const Mat N = lu.kernel();
    return Gk0 + N * random_mat(rng, N.cols(), X0.rows(), 0.5);
}

Summary run_c3()
{
    Summary s;
    const LinearSystem sys = benchmark_system();
    int dataset = 0;
    for (const double b : {0.0, 0.03})
    {
        for (int rep = 0; rep < 10; ++rep, ++dataset)
        {
            const std::uint64_t seed = 300 + static_cast<std::uint64_t>(dataset);
            const DataSet d = excite(sys, Vec::Zero(2), 10, 1.0, box_disturbance(b, 2), seed);
            PriorKnowledge prior;
            prior.Zw = box_disturbance(b, 2);
            prior.model = benchmark_prior_box();
            Rng rng(seed);
            for (int variant = 0; variant < 6; ++variant)
            {
                const Mat Gk =
                    variant == 0 ? canonical_gk(d.X0()) : random_valid_gk(d.X0(), rng);
                const ClosedLoopSet cl = closed_loop_set(d.view(), prior, Gk);
                const Mat truth = sys.A + sys.B * (d.U0 * Gk);
                const Membership m = member_matrix(cl.M, truth, 1e-6);
                if (!m.member || m.residual > 1e-6)
                {
                    std::ostringstream why;
                    why << "dataset " << dataset << " variant " << variant
                        << ": true closed loop outside the learned set (residual "
                        << m.residual << ")";
                    s.fail(why.str());
                }
                s.note_status(m.member ? "member" : "outside");
                s.note_gain(Mat(d.U0 * Gk));
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------- criterion 4

SynthesisSpec scalar_spec(double assumed_b, double lambda)
{
    LinearSystem sys;
    sys.A = 0.5 * Mat::Identity(1, 1);
    sys.B = Mat::Identity(1, 1);
    const DataSet d = excite(sys, Vec::Ones(1), 4, 1.0, box_disturbance(0.0, 1), 2);
    SynthesisSpec spec;
    spec.data = d.view();
    spec.prior.model = ConMatrixZonotope(sys.theta(), {});
    spec.prior.Zw = box_disturbance(assumed_b, 1);
    Polytope P;
    P.H.resize(2, 1);
    P.H << 1, -1;
    P.h = Vec::Ones(2);
    spec.safe_poly = P;
    spec.lambda = lambda;
    return spec;
}

Summary run_c4()
{
    Summary s;
    const SynthesisResult r = synthesize_polytope(scalar_spec(0.1, 0.5));
    s.note_status(to_string(r.status));
    if (r.status != SynthesisStatus::feasible)
    {
        s.fail("scalar instance at lambda 0.5, half-width 0.1 not feasible");
    }
    else
    {
        s.note_gain(r.K);
        if (std::abs(0.5 + r.K(0, 0)) > 0.4 + 1e-6)
        {
            s.fail("returned gain violates |0.5 + K| <= 0.4");
        }
    }
    const auto f = min_lambda(scalar_spec(0.0, 0.5));
    if (!f || f->value > 0.01)
    {
        s.fail("noise-free minimum contraction rate above 0.01");
    }
    else
    {
        s.note_status("minlam " + std::to_string(f->value));
    }
    const auto g = max_disturbance([](double b) { return scalar_spec(b, 0.5); }, 1.0, 1e-3);
    if (!g || std::abs(g->value - 0.5) > 0.01)
    {
        s.fail("maximum tolerated disturbance at lambda 0.5 not within 0.5 +/- 0.01");
    }
    else
    {
        s.note_status("maxb " + std::to_string(g->value));
        s.note_gain(g->result.K);
    }
    return s;
}

// ---------------------------------------------------------------- criterion 5

/// Audit one reported-feasible controller against the true system.
bool audited_ok(const Mat& K, double lambda, double b, std::uint64_t seed, double& margin)
{
    const ValidationReport rep =
        check_contractive(benchmark_system(), K, benchmark_safe_polytope(),
                          box_disturbance(b, 2), lambda, 10000, seed, 1e-8);
    margin = rep.worst_margin;
    return rep.pass() && !rep.enumeration_skipped;
}

Summary run_c5()
{
    Summary s;
    const LinearSystem sys = benchmark_system();
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const DataSet d = excite(sys, Vec::Zero(2), 10, 1.0, box_disturbance(0.03, 2), seed);
        for (const bool polytope_form : {true, false})
        {
            const SynthesisSpec spec = benchmark_spec(d.view(), 0.03, 0.95, true, polytope_form);
            const SynthesisResult r = synthesize(spec);
            s.note_status(std::string(polytope_form ? "poly:" : "czono:") +
                          to_string(r.status));
            if (r.status != SynthesisStatus::feasible)
            {
                continue;
            }
            s.note_gain(r.K);
            double margin = 0.0;
            if (!audited_ok(r.K, 0.95, 0.03, 500 + seed, margin))
            {
                std::ostringstream why;
                why << "seed " << seed << (polytope_form ? " polytope" : " inclusion")
                    << " controller violates contraction (worst margin " << margin << ")";
                s.fail(why.str());
            }
        }
        // frontier controllers get the same audit at their own frontier value
        const auto f = min_lambda(benchmark_spec(d.view(), 0.04, 0.95, true, true));
        if (f)
        {
            s.note_status("minlam-k");
            s.note_gain(f->result.K);
            double margin = 0.0;
            if (!audited_ok(f->result.K, f->value, 0.04, 600 + seed, margin))
            {
                s.fail("frontier controller fails its own contraction audit");
            }
        }
    }
    if (s.gains.empty())
    {
        s.fail("no synthesis path produced a feasible controller to audit");
    }
    return s;
}

// ---------------------------------------------------------------- criterion 6

Summary run_c6()
{
    Summary s;
    const LinearSystem sys = benchmark_system();
    bool strict_b = false, strict_lam = false;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto spec_at = [&](double b, double lambda, bool prior)
        {
            const DataSet d = excite(sys, Vec::Zero(2), 10, 1.0, box_disturbance(b, 2), seed);
            return benchmark_spec(d.view(), b, lambda, prior, true);
        };
        const auto bP =
            max_disturbance([&](double b) { return spec_at(b, 0.98, true); }, 0.5, 1e-3);
        const auto bN =
            max_disturbance([&](double b) { return spec_at(b, 0.98, false); }, 0.5, 1e-3);
        const double vbP = bP ? bP->value : -1.0, vbN = bN ? bN->value : -1.0;
        if (vbP < vbN - 1e-12)
        {
            s.fail("prior knowledge reduced the tolerated disturbance");
        }
        if (vbP > vbN + 1e-9)
        {
            strict_b = true;
        }
        const auto lP = min_lambda(spec_at(0.04, 0.95, true));
        const auto lN = min_lambda(spec_at(0.04, 0.95, false));
        const double vlP = lP ? lP->value : 2.0, vlN = lN ? lN->value : 2.0;
        if (vlP > vlN + 1e-12)
        {
            s.fail("prior knowledge worsened the achievable contraction rate");
        }
        if (vlP < vlN - 1e-9)
        {
            strict_lam = true;
        }
        std::ostringstream line;
        line << "seed " << seed << " maxb " << vbP << "/" << vbN << " minlam " << vlP << "/"
             << vlN;
        s.note_status(line.str());
        if (bP)
        {
            s.note_gain(bP->result.K);
        }
        if (lP)
        {
            s.note_gain(lP->result.K);
        }
    }
    if (!strict_b)
    {
        s.fail("no seed showed a strictly larger disturbance frontier with prior knowledge");
    }
    if (!strict_lam)
    {
        s.fail("no seed showed a strictly smaller contraction rate with prior knowledge");
    }
    return s;
}

// ---------------------------------------------------------------- criterion 7

Summary run_c7()
{
    Summary s;
    const LinearSystem sys = benchmark_system();
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const DataSet d = excite(sys, Vec::Zero(2), 10, 1.0, box_disturbance(0.03, 2), seed);
        for (const bool polytope_form : {true, false})
        {
            const SynthesisResult r =
                synthesize(benchmark_spec(d.view(), 0.03, 0.95, true, polytope_form));
            s.note_status(std::string(polytope_form ? "poly:" : "czono:") +
                          to_string(r.status));
            if (r.status != SynthesisStatus::feasible)
            {
                continue;
            }
            s.note_gain(r.K);
            double margin = 0.0;
            if (!audited_ok(r.K, 0.95, 0.03, 700 + seed, margin))
            {
                std::ostringstream why;
                why << "seed " << seed << ": controller from the "
                    << (polytope_form ? "dual" : "inclusion")
                    << " method fails the shared-safe-set audit (margin " << margin << ")";
                s.fail(why.str());
            }
        }
    }
    if (s.gains.empty())
    {
        s.fail("neither method produced a feasible controller on the shared safe set");
    }
    return s;
}

// ---------------------------------------------------------------- criterion 8

bool summaries_match(const Summary& a, const Summary& b, std::string& why)
{
    if (a.statuses != b.statuses)
    {
        why = "statuses differ across reruns";
        return false;
    }
    if (a.gains.size() != b.gains.size())
    {
        why = "gain counts differ across reruns";
        return false;
    }
    for (size_t i = 0; i < a.gains.size(); ++i)
    {
        if (a.gains[i].rows() != b.gains[i].rows() ||
            a.gains[i].cols() != b.gains[i].cols() ||
            (a.gains[i] - b.gains[i]).cwiseAbs().maxCoeff() > 1e-9)
        {
            why = "gain " + std::to_string(i) + " differs across reruns";
            return false;
        }
    }
    return true;
}

Summary run_c8()
{
    Summary s;
    const std::vector<std::pair<const char*, Summary (*)()>> repeatable = {
        {"3", run_c3}, {"4", run_c4}, {"5", run_c5}, {"6", run_c6}, {"7", run_c7}};
    for (const auto& [name, fn] : repeatable)
    {
        const Summary first = fn();
        const Summary second = fn();
        std::string why;
        if (!summaries_match(first, second, why))
        {
            s.fail("criterion " + std::string(name) + ": " + why);
        }
    }
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 2)
    {
        std::fprintf(stderr, "usage: %s <criterion 1..8>\n", argv[0]);
        return 2;
    }
    const int which = std::atoi(argv[1]);
    const double t0 = now_seconds();
    Summary s;
    switch (which)
    {
        case 1: s = run_c1(); break;
        case 2: s = run_c2(); break;
        case 3: s = run_c3(); break;
        case 4: s = run_c4(); break;
        case 5: s = run_c5(); break;
        case 6: s = run_c6(); break;
        case 7: s = run_c7(); break;
        case 8: s = run_c8(); break;
        default: std::fprintf(stderr, "unknown criterion %d\n", which); return 2;
    }
    const double elapsed = now_seconds() - t0;
    const double budget[] = {0, 30, 60, 30, 10, 300, 600, 300, 1200};
    if (elapsed > budget[which])
    {
        s.fail("runtime " + std::to_string(elapsed) + " s exceeds the budget");
    }
    if (s.pass)
    {
        std::printf("criterion %d: PASS (%.1f s)\n", which, elapsed);
        return 0;
    }
    std::printf("criterion %d: FAIL (%s; %.1f s)\n", which, s.detail.c_str(), elapsed);
    return 1;
}
