#ifndef SAFELOOP_CLOSED_LOOP_HPP_
#define SAFELOOP_CLOSED_LOOP_HPP_

#include <optional>
#include <string>

#include "safeloop/data.hpp"
#include "safeloop/sets.hpp"

namespace safeloop
{

/// What is known before data arrives: an optional constrained matrix zonotope
/// over [A B] (n x (n+m)) and the disturbance set. An absent model means "any
/// matrix pair", the prior-free setting.
struct PriorKnowledge
{
    std::optional<ConMatrixZonotope> model;
    ConZonotope Zw;
};

/// Set of closed-loop matrices A + B*K consistent with the data, the
/// disturbance bound and the prior, for a fixed parametrization G_K.
struct ClosedLoopSet
{
    ConMatrixZonotope M;  // n x n
    Eigen::Index disturbance_gens = 0;  ///< leading generators from the disturbance block
    Eigen::Index prior_gens = 0;        ///< trailing zero generators from the prior block
    std::string provenance;
};

/// Disturbance sequences (n x T matrices) that explain the data under the
/// prior: the T-fold disturbance set intersected with
/// {X1 - theta*D0 : theta in the prior model}.
ConMatrixZonotope consistent_disturbances(const DataView& data, const PriorKnowledge& prior);

/// {(X1 - W)*G_K : W consistent}; requires X0*G_K = I.
ClosedLoopSet closed_loop_set(const DataView& data, const PriorKnowledge& prior, const Mat& Gk);

/// Reachable next states: over-approximation of {M*x + w : M in cl, x in Cx,
/// w in Zw}.
ConZonotope next_state_set(const ClosedLoopSet& cl, const ConZonotope& Cx, const ConZonotope& Zw);

/// Is theta = [A B] consistent with the prior model and with the recorded
/// data under the disturbance bound?
bool theta_consistent(const Mat& theta, const DataView& data, const PriorKnowledge& prior,
                      double tol = 1e-7);

}  // namespace safeloop

#endif
