#include "safeloop/data.hpp"

#include <stdexcept>

namespace safeloop
{

Mat LinearSystem::theta() const
{
    Mat th(n(), n() + m());
    th << A, B;
    return th;
}

Mat DataView::D0() const
{
    Mat d(n() + m(), T());
    d << X0, U0;
    return d;
}

DataSet simulate(const LinearSystem& sys, const Vec& x0, const Mat& u_seq, const Mat& w_seq)
{
    const Eigen::Index n = sys.n();
    const Eigen::Index T = u_seq.cols();
    if (sys.B.rows() != n || x0.size() != n)
    {
        throw std::invalid_argument("simulate: system/state dimensions disagree");
    }
    if (u_seq.rows() != sys.m() || w_seq.rows() != n || w_seq.cols() != T)
    {
        throw std::invalid_argument("simulate: input/disturbance shapes disagree");
    }
    DataSet d;
    d.U0 = u_seq;
    d.W0 = w_seq;
    d.X.resize(n, T + 1);
    d.X.col(0) = x0;
    for (Eigen::Index t = 0; t < T; ++t)
    {
        d.X.col(t + 1) = sys.A * d.X.col(t) + sys.B * u_seq.col(t) + w_seq.col(t);
        if (!d.X.col(t + 1).allFinite())
        {
            throw std::overflow_error("simulate: trajectory diverged to non-finite values");
        }
    }
    return d;
}

Vec sample_czonotope(const ConZonotope& S, Rng& rng)
{
    return sample_member(S, rng);
}

DataSet excite(const LinearSystem& sys, const Vec& x0, int T, double u_range,
               const ConZonotope& Zw, std::uint64_t seed, int max_retries)
{
    const Eigen::Index n = sys.n();
    if (T < n + 1)
    {
        throw std::invalid_argument("excite: need T >= n+1 samples");
    }
    if (Zw.dim() != n)
    {
        throw std::invalid_argument("excite: disturbance set dimension mismatch");
    }
    for (int attempt = 0; attempt <= max_retries; ++attempt)
    {
        Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> unif(-u_range, u_range);
        Mat U(sys.m(), T);
        for (Eigen::Index j = 0; j < T; ++j)
        {
            for (Eigen::Index i = 0; i < sys.m(); ++i)
            {
                U(i, j) = unif(rng);
            }
        }
        Mat W(n, T);
        MemberSampler wsampler(Zw);
        for (Eigen::Index j = 0; j < T; ++j)
        {
            W.col(j) = wsampler.next(rng);
        }
        DataSet d = simulate(sys, x0, U, W);
        if (row_rank_full(d.X0()))
        {
            return d;
        }
    }
    throw std::runtime_error("excite: recorded states never reached full row rank "
                             "(uninformative data)");
}

Mat canonical_gk(const Mat& X0)
{
    return right_inverse(X0);
}

}  // namespace safeloop
