#include "safeloop/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace safeloop
{

const char* to_string(SynthesisStatus s)
{
    switch (s)
    {
        case SynthesisStatus::feasible: return "feasible";
        case SynthesisStatus::infeasible: return "infeasible";
        case SynthesisStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

namespace
{

double seconds_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PriorKnowledge effective_prior(const SynthesisSpec& spec)
{
    PriorKnowledge pr = spec.prior;
    if (!spec.use_prior)
    {
        pr.model.reset();
    }
    return pr;
}

void check_common(const SynthesisSpec& spec)
{
    if (!(spec.lambda > 0.0 && spec.lambda < 1.0))
    {
        throw std::invalid_argument("synthesize: lambda must lie in (0,1)");
    }
    if (!row_rank_full(spec.data.X0))
    {
        throw std::invalid_argument("synthesize: X0 must have full row rank");
    }
}

SynthesisStatus from_lp(LpStatus s)
{
    switch (s)
    {
        case LpStatus::optimal: return SynthesisStatus::feasible;
        case LpStatus::infeasible: return SynthesisStatus::infeasible;
        default: return SynthesisStatus::numerical_failure;
    }
}

void set_block(ExprMat& dst, Eigen::Index r0, Eigen::Index c0, const ExprMat& src)
{
    for (Eigen::Index i = 0; i < src.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < src.cols(); ++j)
        {
            dst.at(r0 + i, c0 + j) = src.at(i, j);
        }
    }
}

/// max_{x : Hx <= h} ||x||_inf, by 2n coordinate LPs.
double polytope_inf_radius(const Polytope& safe)
{
    const Eigen::Index n = safe.H.cols();
    double r = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
    {
        for (const double sign : {1.0, -1.0})
        {
            LpProblem prob;
            const VarBlock x = prob.add_block("x", static_cast<int>(n), 1);
            for (Eigen::Index i = 0; i < safe.H.rows(); ++i)
            {
                LinExpr e;
                for (Eigen::Index j = 0; j < n; ++j)
                {
                    if (safe.H(i, j) != 0.0)
                    {
                        e += LinExpr::var(x(static_cast<int>(j)), safe.H(i, j));
                    }
                }
                prob.add_ineq(e, safe.h(i));
            }
            prob.set_objective(LinExpr::var(x(static_cast<int>(k)), -sign));
            const LpSolution sol = solve(prob);
            if (sol.status == LpStatus::unbounded)
            {
                throw std::invalid_argument("compute_y_l: safe polytope is unbounded");
            }
            if (sol.status != LpStatus::optimal)
            {
                throw std::runtime_error("compute_y_l: radius LP failed");
            }
            r = std::max(r, -sol.objective);
        }
    }
    return r;
}

}  // namespace

YlBound compute_y_l(const Polytope& safe, const DataView& data, const PriorKnowledge& prior,
                    BoundMode mode)
{
    const Eigen::Index q = safe.H.rows();
    if (safe.h.size() != q || safe.H.cols() != data.n())
    {
        throw std::invalid_argument("compute_y_l: polytope shape mismatch");
    }
    const ConMatrixZonotope Mdp = consistent_disturbances(data, prior);
    const Eigen::Index sc = Mdp.num_gens();
    const Eigen::Index sd = data.T() * prior.Zw.num_gens();  // disturbance block
    const Eigen::Index sw = prior.Zw.num_gens();

    YlBound out;
    out.y = Vec::Zero(q);
    for (Eigen::Index j = 0; j < q; ++j)
    {
        for (Eigen::Index i = 0; i < sw; ++i)
        {
            out.y(j) += std::abs(safe.H.row(j).dot(prior.Zw.G.col(i)));
        }
    }

    Mat coef = Mat::Zero(q, sc + sw);
    const double r_p = mode == BoundMode::sound ? polytope_inf_radius(safe) : 0.0;
    for (Eigen::Index i = 0; i < sd; ++i)
    {
        const Mat& Gi = Mdp.G[static_cast<size_t>(i)];
        for (Eigen::Index j = 0; j < q; ++j)
        {
            if (mode == BoundMode::sound)
            {
                coef(j, i) = (safe.H.row(j) * Gi).cwiseAbs().sum() * r_p;
            }
            else
            {
                coef(j, i) = std::abs(safe.h(j)) * inf_norm(Gi);
            }
        }
    }

    // shared factor constraints: data-consistency block plus the disturbance
    // set's own constraints on its appended factors
    const Mat Ac = stacked_constraint_matrix(Mdp);
    const Vec bc = stacked_constraint_rhs(Mdp);
    const Eigen::Index qc = Ac.rows(), qh = prior.Zw.num_cons();
    Mat Abar = Mat::Zero(qc + qh, sc + sw);
    Abar.topLeftCorner(qc, sc) = Ac;
    Abar.bottomRightCorner(qh, sw) = prior.Zw.A;
    Vec bbar(qc + qh);
    bbar << bc, prior.Zw.b;

    out.l = Vec::Zero(q);
    bool nonneg_feasible = true;
    for (Eigen::Index j = 0; j < q && nonneg_feasible; ++j)
    {
        LpProblem prob;
        const VarBlock beta = prob.add_block("beta", static_cast<int>(sc + sw), 1, 0.0, 1.0);
        for (Eigen::Index k = 0; k < Abar.rows(); ++k)
        {
            LinExpr e;
            for (Eigen::Index i = 0; i < Abar.cols(); ++i)
            {
                if (Abar(k, i) != 0.0)
                {
                    e += LinExpr::var(beta(static_cast<int>(i)), Abar(k, i));
                }
            }
            prob.add_eq(e, bbar(k));
        }
        LinExpr obj;
        for (Eigen::Index i = 0; i < sd; ++i)
        {
            if (coef(j, i) != 0.0)
            {
                obj += LinExpr::var(beta(static_cast<int>(i)), -coef(j, i));
            }
        }
        prob.set_objective(obj);
        const LpSolution sol = solve(prob);
        if (sol.status == LpStatus::infeasible)
        {
            nonneg_feasible = false;
        }
        else if (sol.status != LpStatus::optimal)
        {
            throw std::runtime_error("compute_y_l: offset LP failed");
        }
        else
        {
            out.l(j) = -sol.objective;
        }
    }

    if (!nonneg_feasible)
    {
        // The nonnegative-factor restriction can be empty even though the data
        // are consistent (factors of the consistency set are sign-indefinite).
        // Bound each factor's attainable magnitude over the symmetric factor
        // polytope instead and sum; still a valid upper bound, and tighter
        // than treating every factor as free.
        out.fallback = true;
        Vec mag = Vec::Ones(sd);
        bool range_ok = true;
        for (Eigen::Index i = 0; i < sd && range_ok; ++i)
        {
            double m = 0.0;
            for (const double sign : {1.0, -1.0})
            {
                LpProblem prob;
                const VarBlock z =
                    prob.add_block("zeta", static_cast<int>(sc + sw), 1, -1.0, 1.0);
                for (Eigen::Index k = 0; k < Abar.rows(); ++k)
                {
                    LinExpr e;
                    for (Eigen::Index c = 0; c < Abar.cols(); ++c)
                    {
                        if (Abar(k, c) != 0.0)
                        {
                            e += LinExpr::var(z(static_cast<int>(c)), Abar(k, c));
                        }
                    }
                    prob.add_eq(e, bbar(k));
                }
                prob.set_objective(LinExpr::var(z(static_cast<int>(i)), -sign));
                const LpSolution sol = solve(prob);
                if (sol.status != LpStatus::optimal)
                {
                    range_ok = false;
                    break;
                }
                m = std::max(m, -sol.objective);
            }
            if (range_ok)
            {
                mag(i) = std::min(1.0, std::max(0.0, m));
            }
        }
        if (!range_ok)
        {
            mag = Vec::Ones(sd);
        }
        for (Eigen::Index j = 0; j < q; ++j)
        {
            out.l(j) = coef.row(j).head(sd).dot(mag);
        }
    }
    return out;
}

SynthesisResult synthesize_polytope(const SynthesisSpec& spec)
{
    if (!spec.safe_poly)
    {
        throw std::invalid_argument("synthesize_polytope: no polytope safe set in spec");
    }
    check_common(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const PriorKnowledge pr = effective_prior(spec);
    const Polytope& safe = *spec.safe_poly;
    const Eigen::Index n = spec.data.n();
    const Eigen::Index T = spec.data.T();
    const Eigen::Index q = safe.H.rows();

    const YlBound yl = compute_y_l(safe, spec.data, pr, spec.bound_mode);
    const ConMatrixZonotope Mdp = consistent_disturbances(spec.data, pr);

    LpProblem prob;
    const VarBlock Pb = prob.add_block("P", static_cast<int>(q), static_cast<int>(q), 0.0, kInf);
    const VarBlock gk = prob.add_block("G_K", static_cast<int>(T), static_cast<int>(n));
    const VarBlock rho = prob.add_block("rho", 1, 1, 0.0, kInf);
    const ExprMat P_e = ExprMat::from_block(Pb);
    const ExprMat GK_e = ExprMat::from_block(gk);

    // row conditions: P h + rho l <= lambda h - H c_w - y
    const Vec hc = safe.H * pr.Zw.c;
    for (Eigen::Index j = 0; j < q; ++j)
    {
        LinExpr e;
        for (Eigen::Index k = 0; k < q; ++k)
        {
            if (safe.h(k) != 0.0)
            {
                e += LinExpr::var(Pb(static_cast<int>(j), static_cast<int>(k)), safe.h(k));
            }
        }
        e += LinExpr::var(rho(0), yl.l(j));
        prob.add_ineq(e, spec.lambda * safe.h(j) - hc(j) - yl.y(j));
    }
    // P H = H (X1 - C_w) G_K
    prob.add_eq(P_e * safe.H - Mat(safe.H * (spec.data.X1 - Mdp.C)) * GK_e, Mat::Zero(q, n));
    // row sums of |G_K| <= rho
    std::vector<std::vector<LinExpr>> rows(static_cast<size_t>(T));
    std::vector<LinExpr> rhs(static_cast<size_t>(T), LinExpr::var(rho(0)));
    for (Eigen::Index i = 0; i < T; ++i)
    {
        for (Eigen::Index j = 0; j < n; ++j)
        {
            rows[static_cast<size_t>(i)].push_back(
                LinExpr::var(gk(static_cast<int>(i), static_cast<int>(j))));
        }
    }
    add_abs_row_bound(prob, rows, rhs);
    // X0 G_K = I
    prob.add_eq(Mat(spec.data.X0) * GK_e, Mat::Identity(n, n));
    prob.set_objective(LinExpr::var(rho(0)));

    const LpSolution sol = solve(prob, spec.tol);

    SynthesisResult res;
    res.status = from_lp(sol.status);
    res.lambda = spec.lambda;
    res.y = yl.y;
    res.l = yl.l;
    res.y_l_fallback = yl.fallback;
    res.generator_count = Mdp.num_gens();
    res.residual = sol.max_residual;
    if (res.status == SynthesisStatus::feasible)
    {
        res.Gk = sol.block(prob, "G_K");
        res.K = spec.data.U0 * res.Gk;
        res.P = sol.block(prob, "P");
        res.rho = sol.block(prob, "rho")(0, 0);
    }
    res.solve_seconds = seconds_since(t0);
    return res;
}

SynthesisResult synthesize_czono(const SynthesisSpec& spec)
{
    if (!spec.safe_cz)
    {
        throw std::invalid_argument("synthesize_czono: no constrained-zonotope safe set in spec");
    }
    check_common(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const PriorKnowledge pr = effective_prior(spec);
    const ConZonotope& S = *spec.safe_cz;
    const ConZonotope& Zw = pr.Zw;
    const Eigen::Index n = spec.data.n();
    const Eigen::Index T = spec.data.T();
    if (S.dim() != n)
    {
        throw std::invalid_argument("synthesize_czono: safe set dimension mismatch");
    }
    const double lam = spec.lambda;

    const ConMatrixZonotope Mdp = consistent_disturbances(spec.data, pr);
    const Eigen::Index sc = Mdp.num_gens();
    const Eigen::Index sx = S.num_gens();
    const Eigen::Index sh = Zw.num_gens();
    const Eigen::Index s1 = sc + sx + sc * sx + sh;

    // constant factor constraints of the reachable next-state set
    const Mat Ad = stacked_constraint_matrix(Mdp);
    const Vec bd = stacked_constraint_rhs(Mdp);
    const Eigen::Index qd = Ad.rows(), qx = S.num_cons(), qh = Zw.num_cons();
    const Eigen::Index q1 = qd + qx + qh;
    Mat A1 = Mat::Zero(q1, s1);
    A1.topLeftCorner(qd, sc) = Ad;
    A1.block(qd, sc, qx, sx) = S.A;
    A1.block(qd + qx, sc + sx + sc * sx, qh, sh) = Zw.A;
    Vec b1(q1);
    b1 << bd, S.b, Zw.b;

    LpProblem prob;
    const VarBlock gk = prob.add_block("G_K", static_cast<int>(T), static_cast<int>(n));
    const VarBlock gamma = prob.add_block("Gamma", static_cast<int>(sx), static_cast<int>(s1));
    const VarBlock Lb = prob.add_block("L", static_cast<int>(sx), 1);
    const ExprMat GK_e = ExprMat::from_block(gk);
    const ExprMat Gamma_e = ExprMat::from_block(gamma);
    const ExprMat L_e = ExprMat::from_block(Lb);

    const Mat shift = spec.data.X1 - Mdp.C;  // closed-loop center = shift * G_K
    const ExprMat v_e = GK_e * Mat(S.c);     // T x 1
    const ExprMat W_e = GK_e * Mat(S.G);     // T x sx

    // generator matrix of the reachable set, entry-affine in G_K
    ExprMat G1_e(n, s1);
    for (Eigen::Index i = 0; i < sc; ++i)
    {
        set_block(G1_e, 0, i, Mat(-Mdp.G[static_cast<size_t>(i)]) * v_e);
    }
    set_block(G1_e, 0, sc, Mat(shift) * W_e);
    for (Eigen::Index i = 0; i < sc; ++i)
    {
        set_block(G1_e, 0, sc + sx + i * sx, Mat(-Mdp.G[static_cast<size_t>(i)]) * W_e);
    }
    set_block(G1_e, 0, sc + sx + sc * sx, ExprMat::constant(Zw.G));

    // center condition: c_x - (shift G_K c_x + c_w) = lambda G_x L
    prob.add_eq(Mat(lam * S.G) * L_e + Mat(shift) * v_e, Mat(S.c - Zw.c));
    // generator condition: G1 = lambda G_x Gamma
    prob.add_eq(Mat(lam * S.G) * Gamma_e - G1_e, Mat::Zero(n, s1));
    if (qx > 0)
    {
        const VarBlock Pb = prob.add_block("P", static_cast<int>(qx), static_cast<int>(q1));
        const ExprMat P_e = ExprMat::from_block(Pb);
        prob.add_eq(P_e * A1 - Mat(S.A) * Gamma_e, Mat::Zero(qx, s1));
        prob.add_eq(P_e * Mat(b1) - Mat(S.A) * L_e, Mat(lam * S.b));
    }
    // |Gamma| 1 + |L| <= 1 rowwise
    std::vector<std::vector<LinExpr>> rows(static_cast<size_t>(sx));
    std::vector<LinExpr> rhs(static_cast<size_t>(sx), LinExpr(1.0));
    for (Eigen::Index k = 0; k < sx; ++k)
    {
        for (Eigen::Index j = 0; j < s1; ++j)
        {
            rows[static_cast<size_t>(k)].push_back(
                LinExpr::var(gamma(static_cast<int>(k), static_cast<int>(j))));
        }
        rows[static_cast<size_t>(k)].push_back(LinExpr::var(Lb(static_cast<int>(k))));
    }
    add_abs_row_bound(prob, rows, rhs);
    // parametrization: X0 G_K = I
    prob.add_eq(Mat(spec.data.X0) * GK_e, Mat::Identity(n, n));

    const LpSolution sol = solve(prob, spec.tol);

    SynthesisResult res;
    res.status = from_lp(sol.status);
    res.lambda = lam;
    res.generator_count = s1;
    res.residual = sol.max_residual;
    if (res.status == SynthesisStatus::feasible)
    {
        res.Gk = sol.block(prob, "G_K");
        res.K = spec.data.U0 * res.Gk;
        // independent re-verification of the inclusion certificate
        try
        {
            const ClosedLoopSet cl = closed_loop_set(spec.data, pr, res.Gk);
            const ConZonotope reach = next_state_set(cl, S, Zw);
            res.cert = contains(reach, scale_level_set(S, lam), spec.tol);
            if (!res.cert)
            {
                res.status = SynthesisStatus::numerical_failure;
            }
        }
        catch (const std::exception&)
        {
            res.status = SynthesisStatus::numerical_failure;
        }
    }
    res.solve_seconds = seconds_since(t0);
    return res;
}

SynthesisResult synthesize(const SynthesisSpec& spec)
{
    if (spec.safe_poly.has_value() == spec.safe_cz.has_value())
    {
        throw std::invalid_argument("synthesize: exactly one safe-set representation required");
    }
    return spec.safe_poly ? synthesize_polytope(spec) : synthesize_czono(spec);
}

SynthesisSpec prior_free_variant(const SynthesisSpec& spec)
{
    SynthesisSpec out = spec;
    out.use_prior = false;
    return out;
}

std::optional<Frontier> min_lambda(const SynthesisSpec& spec, double lambda_tol)
{
    if (lambda_tol <= 0.0)
    {
        throw std::invalid_argument("min_lambda: tolerance must be positive");
    }
    auto try_lambda = [&](double lam) {
        SynthesisSpec s = spec;
        s.lambda = lam;
        return synthesize(s);
    };
    double hi = 1.0 - lambda_tol;
    SynthesisResult best = try_lambda(hi);
    if (best.status != SynthesisStatus::feasible)
    {
        return std::nullopt;
    }
    double lo = 0.0;
    while (hi - lo > lambda_tol)
    {
        const double mid = 0.5 * (lo + hi);
        SynthesisResult r = try_lambda(mid);
        if (r.status == SynthesisStatus::feasible)
        {
            hi = mid;
            best = std::move(r);
        }
        else
        {
            lo = mid;
        }
    }
    return Frontier{hi, std::move(best)};
}

std::optional<Frontier> max_disturbance(const std::function<SynthesisSpec(double)>& spec_for,
                                        double b_max, double b_tol)
{
    if (b_tol <= 0.0 || b_max <= 0.0)
    {
        throw std::invalid_argument("max_disturbance: tolerances must be positive");
    }
    auto try_b = [&](double b) { return synthesize(spec_for(b)); };
    SynthesisResult at_top = try_b(b_max);
    if (at_top.status == SynthesisStatus::feasible)
    {
        return Frontier{b_max, std::move(at_top)};
    }
    SynthesisResult best = try_b(0.0);
    if (best.status != SynthesisStatus::feasible)
    {
        return std::nullopt;
    }
    double lo = 0.0, hi = b_max;
    while (hi - lo > b_tol)
    {
        const double mid = 0.5 * (lo + hi);
        SynthesisResult r = try_b(mid);
        if (r.status == SynthesisStatus::feasible)
        {
            lo = mid;
            best = std::move(r);
        }
        else
        {
            hi = mid;
        }
    }
    return Frontier{lo, std::move(best)};
}

}  // namespace safeloop
