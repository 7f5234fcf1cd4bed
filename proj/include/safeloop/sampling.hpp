#ifndef SAFELOOP_SAMPLING_HPP_
#define SAFELOOP_SAMPLING_HPP_

#include <random>

#include "safeloop/sets.hpp"

namespace safeloop
{

using Rng = std::mt19937_64;

/// Uniform point in [-1,1]^s.
Vec sample_unit_box(Rng& rng, Eigen::Index s);

/// Hit-and-run sampler over the factor set {zeta in [-1,1]^s : A zeta = b}.
/// Walks in the nullspace of A from an LP-computed interior start, so every
/// sample satisfies the constraints exactly (up to solver accuracy).
class FactorSampler
{
public:
    FactorSampler(const Mat& A, const Vec& b, Eigen::Index s);

    /// One fresh factor vector; advances the chain.
    Vec next(Rng& rng);

private:
    void step(Rng& rng);

    Vec current_;
    Mat nullspace_;  // s x k orthonormal basis of ker(A)
    int steps_per_sample_ = 15;
};

/// Random member of a constrained zonotope (approximately uniform over the
/// factor set, mapped through the generators).
Vec sample_member(const ConZonotope& S, Rng& rng);

/// Random member of a constrained matrix zonotope.
Mat sample_member(const ConMatrixZonotope& S, Rng& rng);

/// Reusable member sampler: pays the interior-point LP and nullspace
/// factorization once, then draws cheaply.
class MemberSampler
{
public:
    explicit MemberSampler(const ConZonotope& S);

    Vec next(Rng& rng);

private:
    ConZonotope set_;
    std::optional<FactorSampler> factors_;  // engaged when the set is constrained
};

}  // namespace safeloop

#endif
