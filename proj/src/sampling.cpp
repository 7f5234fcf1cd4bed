#include "safeloop/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace safeloop
{

Vec sample_unit_box(Rng& rng, Eigen::Index s)
{
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vec z(s);
    for (Eigen::Index i = 0; i < s; ++i)
    {
        z(i) = unif(rng);
    }
    return z;
}

FactorSampler::FactorSampler(const Mat& A, const Vec& b, Eigen::Index s)
{
    if (A.cols() != s || A.rows() != b.size())
    {
        throw std::invalid_argument("FactorSampler: constraint shape mismatch");
    }
    if (A.rows() == 0)
    {
        current_ = Vec::Zero(s);
        nullspace_ = Mat::Identity(s, s);
        return;
    }
    // Chebyshev-style interior start: maximize the margin t with
    // A zeta = b and -1 + t <= zeta <= 1 - t.
    LpProblem prob;
    const VarBlock z = prob.add_block("zeta", static_cast<int>(s), 1, -1.0, 1.0);
    const VarBlock t = prob.add_block("t", 1, 1, 0.0, 1.0);
    for (Eigen::Index k = 0; k < A.rows(); ++k)
    {
        LinExpr e;
        for (Eigen::Index j = 0; j < s; ++j)
        {
            if (A(k, j) != 0.0)
            {
                e += LinExpr::var(z(static_cast<int>(j)), A(k, j));
            }
        }
        prob.add_eq(e, b(k));
    }
    for (Eigen::Index j = 0; j < s; ++j)
    {
        prob.add_ineq(LinExpr::var(z(static_cast<int>(j))) + LinExpr::var(t(0)), 1.0);
        prob.add_ineq(LinExpr::var(z(static_cast<int>(j)), -1.0) + LinExpr::var(t(0)), 1.0);
    }
    prob.set_objective(LinExpr::var(t(0), -1.0));
    const LpSolution sol = solve(prob);
    if (sol.status != LpStatus::optimal)
    {
        throw std::runtime_error("FactorSampler: factor set is empty or ill-posed");
    }
    current_ = sol.x.head(s);

    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-10);
    Mat K = lu.kernel();
    if (K.cols() == 1 && K.isZero(1e-12))
    {
        nullspace_ = Mat::Zero(s, 0);
    }
    else
    {
        // orthonormalize for well-scaled directions
        Eigen::HouseholderQR<Mat> qr(K);
        nullspace_ = Mat(qr.householderQ()) * Mat::Identity(s, K.cols());
    }
}

void FactorSampler::step(Rng& rng)
{
    const Eigen::Index k = nullspace_.cols();
    if (k == 0)
    {
        return;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec w(k);
    for (Eigen::Index i = 0; i < k; ++i)
    {
        w(i) = gauss(rng);
    }
    Vec d = nullspace_ * w;
    const double nd = d.norm();
    if (nd < 1e-14)
    {
        return;
    }
    d /= nd;
    // largest segment [tmin, tmax] with current + t*d inside the box
    double tmin = -kInf, tmax = kInf;
    for (Eigen::Index i = 0; i < d.size(); ++i)
    {
        if (std::abs(d(i)) < 1e-14)
        {
            continue;
        }
        const double lo = (-1.0 - current_(i)) / d(i);
        const double hi = (1.0 - current_(i)) / d(i);
        tmin = std::max(tmin, std::min(lo, hi));
        tmax = std::min(tmax, std::max(lo, hi));
    }
    if (!(tmax > tmin) || !std::isfinite(tmin) || !std::isfinite(tmax))
    {
        return;
    }
    std::uniform_real_distribution<double> unif(tmin, tmax);
    current_ += unif(rng) * d;
    current_ = current_.cwiseMax(-1.0).cwiseMin(1.0);
}

Vec FactorSampler::next(Rng& rng)
{
    for (int i = 0; i < steps_per_sample_; ++i)
    {
        step(rng);
    }
    return current_;
}

Vec sample_member(const ConZonotope& S, Rng& rng)
{
    if (S.num_cons() == 0)
    {
        return S.c + S.G * sample_unit_box(rng, S.num_gens());
    }
    FactorSampler sampler(S.A, S.b, S.num_gens());
    return S.c + S.G * sampler.next(rng);
}

MemberSampler::MemberSampler(const ConZonotope& S) : set_(S)
{
    if (set_.num_cons() > 0)
    {
        factors_.emplace(set_.A, set_.b, set_.num_gens());
    }
}

Vec MemberSampler::next(Rng& rng)
{
    const Vec zeta =
        factors_ ? factors_->next(rng) : sample_unit_box(rng, set_.num_gens());
    return set_.c + set_.G * zeta;
}

Mat sample_member(const ConMatrixZonotope& S, Rng& rng)
{
    const Eigen::Index s = S.num_gens();
    Vec zeta;
    if (S.Bc.size() == 0)
    {
        zeta = sample_unit_box(rng, s);
    }
    else
    {
        FactorSampler sampler(stacked_constraint_matrix(S), stacked_constraint_rhs(S), s);
        zeta = sampler.next(rng);
    }
    Mat X = S.C;
    for (Eigen::Index i = 0; i < s; ++i)
    {
        X += zeta(i) * S.G[static_cast<size_t>(i)];
    }
    return X;
}

}  // namespace safeloop
