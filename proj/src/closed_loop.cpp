#include "safeloop/closed_loop.hpp"

#include <sstream>
#include <stdexcept>

namespace safeloop
{

namespace
{
/// {X1 - theta*D0 : theta in model} as an n x T constrained matrix zonotope.
/// Constraint blocks of the model (if any) are zero-padded on the right to T
/// columns so they can stack against T-column disturbance constraints.
ConMatrixZonotope data_residual_set(const ConMatrixZonotope& model, const Mat& X1, const Mat& D0)
{
    if (model.cols() != D0.rows())
    {
        throw std::invalid_argument("consistent_disturbances: prior model width must be n+m");
    }
    const Eigen::Index T = D0.cols();
    ConMatrixZonotope R;
    R.C = X1 - model.C * D0;
    R.G.reserve(model.G.size());
    for (const auto& Gi : model.G)
    {
        R.G.push_back(-(Gi * D0));
    }
    const Eigen::Index q = model.Bc.rows();
    const Eigen::Index p = model.Bc.cols();
    if (q > 0 && p > T)
    {
        throw std::invalid_argument(
            "consistent_disturbances: prior constraint blocks wider than the data horizon");
    }
    R.Bc = Mat::Zero(q, T);
    R.Bc.leftCols(p) = model.Bc;
    R.Ac.reserve(model.Ac.size());
    for (const auto& Ai : model.Ac)
    {
        Mat padded = Mat::Zero(q, T);
        padded.leftCols(p) = Ai;
        R.Ac.push_back(std::move(padded));
    }
    return R;
}
}  // namespace

ConMatrixZonotope consistent_disturbances(const DataView& data, const PriorKnowledge& prior)
{
    if (prior.Zw.dim() != data.n())
    {
        throw std::invalid_argument("consistent_disturbances: disturbance dimension mismatch");
    }
    const ConMatrixZonotope Mw = concat_T(prior.Zw, static_cast<int>(data.T()));
    if (!prior.model)
    {
        return Mw;
    }
    const ConMatrixZonotope Md = data_residual_set(*prior.model, data.X1, data.D0());
    return intersect(Mw, Md);
}

ClosedLoopSet closed_loop_set(const DataView& data, const PriorKnowledge& prior, const Mat& Gk)
{
    if (Gk.rows() != data.T() || Gk.cols() != data.n())
    {
        throw std::invalid_argument("closed_loop_set: G_K must be T x n");
    }
    const Mat residual = data.X0 * Gk - Mat::Identity(data.n(), data.n());
    if (residual.cwiseAbs().maxCoeff() > 1e-6)
    {
        throw std::invalid_argument("closed_loop_set: X0*G_K = I violated");
    }
    const ConMatrixZonotope Mdp = consistent_disturbances(data, prior);

    ConMatrixZonotope diff;  // X1 - Mdp, constraints untouched
    diff.C = data.X1 - Mdp.C;
    diff.G.reserve(Mdp.G.size());
    for (const auto& Gi : Mdp.G)
    {
        diff.G.push_back(-Gi);
    }
    diff.Ac = Mdp.Ac;
    diff.Bc = Mdp.Bc;

    ClosedLoopSet cl;
    cl.M = map(diff, Gk);
    cl.disturbance_gens = static_cast<Eigen::Index>(data.T()) * prior.Zw.num_gens();
    cl.prior_gens = cl.M.num_gens() - cl.disturbance_gens;
    std::ostringstream os;
    os << "T=" << data.T() << " n=" << data.n() << " m=" << data.m()
       << " prior=" << (prior.model ? "model" : "none");
    cl.provenance = os.str();
    return cl;
}

ConZonotope next_state_set(const ClosedLoopSet& cl, const ConZonotope& Cx, const ConZonotope& Zw)
{
    if (Cx.dim() != cl.M.rows() || Zw.dim() != cl.M.rows())
    {
        throw std::invalid_argument("next_state_set: dimension mismatch");
    }
    return minkowski_sum(product(cl.M, Cx), Zw);
}

bool theta_consistent(const Mat& theta, const DataView& data, const PriorKnowledge& prior,
                      double tol)
{
    if (theta.rows() != data.n() || theta.cols() != data.n() + data.m())
    {
        throw std::invalid_argument("theta_consistent: theta must be n x (n+m)");
    }
    if (prior.model && !member_matrix(*prior.model, theta, tol).member)
    {
        return false;
    }
    const ConMatrixZonotope Mw = concat_T(prior.Zw, static_cast<int>(data.T()));
    const Mat W = data.X1 - theta * data.D0();
    return member_matrix(Mw, W, tol).member;
}

}  // namespace safeloop
