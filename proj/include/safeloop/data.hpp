#ifndef SAFELOOP_DATA_HPP_
#define SAFELOOP_DATA_HPP_

#include <cstdint>

#include "safeloop/sampling.hpp"
#include "safeloop/sets.hpp"

namespace safeloop
{

/// x(t+1) = A x(t) + B u(t) + w(t)
struct LinearSystem
{
    Mat A;
    Mat B;

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index m() const { return B.cols(); }
    Mat theta() const;  ///< [A B], n x (n+m)
};

/// What a synthesizer is allowed to see: recorded inputs and states only.
/// Neither the true system matrices nor the disturbance realization appear.
struct DataView
{
    Mat U0;  // m x T
    Mat X0;  // n x T
    Mat X1;  // n x T

    Eigen::Index T() const { return U0.cols(); }
    Eigen::Index n() const { return X0.rows(); }
    Eigen::Index m() const { return U0.rows(); }
    Mat D0() const;  ///< [X0; U0], (n+m) x T
};

/// Full experiment record. W0 is the disturbance realization; it exists for
/// testing and audits only and is deliberately absent from DataView.
struct DataSet
{
    Mat U0;  // m x T
    Mat X;   // n x (T+1)
    Mat W0;  // n x T, hidden from synthesis

    Eigen::Index T() const { return U0.cols(); }
    Mat X0() const { return X.leftCols(T()); }
    Mat X1() const { return X.rightCols(T()); }
    DataView view() const { return DataView{U0, X0(), X1()}; }
};

/// Roll the recursion exactly; throws std::overflow_error if the trajectory
/// leaves the finite range.
DataSet simulate(const LinearSystem& sys, const Vec& x0, const Mat& u_seq, const Mat& w_seq);

/// Seed-deterministic random member of a constrained zonotope.
Vec sample_czonotope(const ConZonotope& S, Rng& rng);

/// Excite the system with uniform inputs in [-u_range, u_range]^m and
/// disturbances drawn from Zw, retrying with fresh seed-derived streams until
/// the recorded X0 has full row rank. Requires T >= n+1.
DataSet excite(const LinearSystem& sys, const Vec& x0, int T, double u_range,
               const ConZonotope& Zw, std::uint64_t seed, int max_retries = 32);

/// Minimum-norm G_K with X0 * G_K = I; the default controller parametrization.
Mat canonical_gk(const Mat& X0);

}  // namespace safeloop

#endif
