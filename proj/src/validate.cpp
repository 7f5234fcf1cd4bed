#include "safeloop/validate.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace safeloop
{

namespace
{

double seconds_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Axis-aligned bounding box of {x : Hx <= h} via 2n LPs.
void bounding_box(const Polytope& P, Vec& lo, Vec& hi)
{
    const Eigen::Index n = P.H.cols();
    lo.resize(n);
    hi.resize(n);
    for (Eigen::Index k = 0; k < n; ++k)
    {
        for (const double sign : {1.0, -1.0})
        {
            LpProblem prob;
            const VarBlock x = prob.add_block("x", static_cast<int>(n), 1);
            for (Eigen::Index i = 0; i < P.H.rows(); ++i)
            {
                LinExpr e;
                for (Eigen::Index j = 0; j < n; ++j)
                {
                    if (P.H(i, j) != 0.0)
                    {
                        e += LinExpr::var(x(static_cast<int>(j)), P.H(i, j));
                    }
                }
                prob.add_ineq(e, P.h(i));
            }
            prob.set_objective(LinExpr::var(x(static_cast<int>(k)), -sign));
            const LpSolution sol = solve(prob);
            if (sol.status != LpStatus::optimal)
            {
                throw std::invalid_argument("polytope is empty or unbounded");
            }
            (sign > 0 ? hi : lo)(k) = sign * -sol.objective;
        }
    }
}

void record(ValidationReport& rep, const Polytope& safe, double lambda, const Vec& xplus,
            double tol)
{
    ++rep.tested;
    const Vec margins = lambda * safe.h - safe.H * xplus;
    const double m = margins.minCoeff();
    rep.worst_margin = std::min(rep.worst_margin, m);
    if (m < -tol)
    {
        ++rep.violations;
    }
}

}  // namespace

std::vector<Vec> polytope_vertices(const Polytope& P, double tol)
{
    const Eigen::Index q = P.H.rows();
    const Eigen::Index n = P.H.cols();
    std::vector<Vec> verts;
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    // iterate over all n-subsets of rows
    std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start,
                                                              Eigen::Index depth) {
        if (depth == n)
        {
            Mat A(n, n);
            Vec b(n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                A.row(i) = P.H.row(idx[static_cast<size_t>(i)]);
                b(i) = P.h(idx[static_cast<size_t>(i)]);
            }
            Eigen::FullPivLU<Mat> lu(A);
            lu.setThreshold(tol);
            if (!lu.isInvertible())
            {
                return;
            }
            const Vec v = lu.solve(b);
            if (((P.H * v - P.h).array() > 1e-7).any())
            {
                return;
            }
            for (const Vec& w : verts)
            {
                if ((w - v).cwiseAbs().maxCoeff() < 1e-9)
                {
                    return;
                }
            }
            verts.push_back(v);
            return;
        }
        for (Eigen::Index i = start; i < q; ++i)
        {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (q >= n)
    {
        rec(0, 0);
    }
    return verts;
}

Vec sample_polytope(const Polytope& P, Rng& rng)
{
    Vec lo, hi;
    bounding_box(P, lo, hi);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int attempt = 0; attempt < 100000; ++attempt)
    {
        Vec x(lo.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            x(i) = lo(i) + (hi(i) - lo(i)) * unif(rng);
        }
        if (((P.H * x - P.h).array() <= 1e-12).all())
        {
            return x;
        }
    }
    throw std::runtime_error("sample_polytope: rejection sampling failed (thin polytope?)");
}

std::vector<Vec> zonotope_extremes(const ConZonotope& Z, int max_gens)
{
    std::vector<Vec> out;
    const Eigen::Index s = Z.num_gens();
    if (Z.num_cons() > 0 || s > max_gens)
    {
        return out;
    }
    const long count = 1L << s;
    out.reserve(static_cast<size_t>(count));
    for (long mask = 0; mask < count; ++mask)
    {
        Vec sigma(s);
        for (Eigen::Index i = 0; i < s; ++i)
        {
            sigma(i) = (mask >> i) & 1 ? 1.0 : -1.0;
        }
        out.push_back(Z.c + Z.G * sigma);
    }
    return out;
}

ValidationReport check_contractive(const LinearSystem& sys, const Mat& K, const Polytope& safe,
                                   const ConZonotope& Zw, double lambda, long N,
                                   std::uint64_t seed, double tol)
{
    if (K.rows() != sys.m() || K.cols() != sys.n())
    {
        throw std::invalid_argument("check_contractive: K must be m x n");
    }
    const auto t0 = std::chrono::steady_clock::now();
    ValidationReport rep;
    rep.method = "contractive";
    rep.lambda = lambda;
    rep.worst_margin = kInf;
    const Mat Acl = sys.A + sys.B * K;

    const std::vector<Vec> extremes = zonotope_extremes(Zw);
    if (sys.n() <= 3 && !extremes.empty())
    {
        for (const Vec& v : polytope_vertices(safe))
        {
            for (const Vec& w : extremes)
            {
                record(rep, safe, lambda, Acl * v + w, tol);
            }
        }
    }
    else
    {
        rep.enumeration_skipped = true;
    }

    Rng rng(seed);
    MemberSampler wsampler(Zw);
    Vec lo, hi;
    bounding_box(safe, lo, hi);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long drawn = 0;
    long attempts = 0;
    while (drawn < N && attempts < 1000 * N + 100000)
    {
        ++attempts;
        Vec x(lo.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            x(i) = lo(i) + (hi(i) - lo(i)) * unif(rng);
        }
        if (((safe.H * x - safe.h).array() > 1e-12).any())
        {
            continue;
        }
        ++drawn;
        record(rep, safe, lambda, Acl * x + wsampler.next(rng), tol);
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

ValidationReport check_ris(const LinearSystem& sys, const Mat& K, const Polytope& safe,
                           const ConZonotope& Zw, int horizon, long N, std::uint64_t seed,
                           double tol)
{
    if (horizon < 0)
    {
        throw std::invalid_argument("check_ris: horizon must be nonnegative");
    }
    const auto t0 = std::chrono::steady_clock::now();
    ValidationReport rep;
    rep.method = "ris";
    rep.lambda = 1.0;
    rep.worst_margin = kInf;
    const Mat Acl = sys.A + sys.B * K;
    Rng rng(seed);
    MemberSampler wsampler(Zw);
    for (long run = 0; run < N; ++run)
    {
        Vec x = sample_polytope(safe, rng);
        for (int t = 0; t < horizon; ++t)
        {
            x = Acl * x + wsampler.next(rng);
            record(rep, safe, 1.0, x, tol);
        }
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

OracleOutcome oracle_containment(const ConZonotope& C1, const ConZonotope& C2, long N,
                                 std::uint64_t seed, double tol)
{
    if (C1.dim() != C2.dim())
    {
        throw std::invalid_argument("oracle_containment: dimension mismatch");
    }
    OracleOutcome out;
    Rng rng(seed);
    MemberSampler sampler(C1);
    for (long i = 0; i < N; ++i)
    {
        const Vec x = sampler.next(rng);
        if (!member_point(C2, x, tol).member)
        {
            out.certificate_consistent = false;
            out.counterexample = x;
            return out;
        }
    }
    return out;
}

}  // namespace safeloop
