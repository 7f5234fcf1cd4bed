#ifndef SAFELOOP_SYNTHESIS_HPP_
#define SAFELOOP_SYNTHESIS_HPP_

#include <functional>
#include <optional>

#include "safeloop/closed_loop.hpp"

namespace safeloop
{

/// How the per-row uncertainty coefficients l_j are computed for the polytope
/// method. `sound` bounds the state by the polytope's actual infinity-norm
/// radius and is valid for any polytope; `classic` uses the normalized-row
/// shortcut and is retained for reproduction on symmetric unit-scale sets.
enum class BoundMode
{
    classic,
    sound
};

enum class SynthesisStatus
{
    feasible,
    infeasible,
    numerical_failure
};

const char* to_string(SynthesisStatus s);

struct SynthesisSpec
{
    DataView data;
    PriorKnowledge prior;
    bool use_prior = true;
    std::optional<Polytope> safe_poly;  // exactly one safe-set form active
    std::optional<ConZonotope> safe_cz;
    double lambda = 0.95;
    BoundMode bound_mode = BoundMode::sound;
    double tol = 1e-7;
};

struct SynthesisResult
{
    SynthesisStatus status = SynthesisStatus::infeasible;
    Mat K;   // m x n
    Mat Gk;  // T x n
    double lambda = 0.0;
    // polytope-method certificate
    Mat P;
    double rho = 0.0;
    Vec y, l;
    bool y_l_fallback = false;
    // inclusion-method certificate, re-verified after the joint solve
    std::optional<ContainmentCert> cert;
    // diagnostics
    double residual = 0.0;
    Eigen::Index generator_count = 0;
    double solve_seconds = 0.0;
};

struct YlBound
{
    Vec y;
    Vec l;
    bool fallback = false;
};

/// Disturbance (y) and model-uncertainty (l) offsets for the polytope method,
/// one entry per polytope row.
YlBound compute_y_l(const Polytope& safe, const DataView& data, const PriorKnowledge& prior,
                    BoundMode mode);

/// Joint feasibility program in (G_K, Gamma, L, P) certifying that the
/// reachable next-state set lands inside the lambda-scaled safe set.
SynthesisResult synthesize_czono(const SynthesisSpec& spec);

/// Dual LP: minimize rho over (P, G_K, rho) subject to the row-wise
/// contraction conditions with precomputed y, l.
SynthesisResult synthesize_polytope(const SynthesisSpec& spec);

/// Dispatch on whichever safe-set representation the problem carries.
SynthesisResult synthesize(const SynthesisSpec& spec);

/// Same problem with the model prior ignored; only data and the disturbance
/// bound constrain the closed loop.
SynthesisSpec prior_free_variant(const SynthesisSpec& spec);

struct Frontier
{
    double value = 0.0;
    SynthesisResult result;
};

/// Smallest contraction rate for which synthesis is feasible, to within
/// lambda_tol; nullopt if infeasible even at lambda = 1 - lambda_tol.
std::optional<Frontier> min_lambda(const SynthesisSpec& spec, double lambda_tol = 1e-3);

/// Largest disturbance level b in [0, b_max] for which spec_for(b) is
/// feasible, to within b_tol; nullopt if infeasible already at b = 0.
std::optional<Frontier> max_disturbance(const std::function<SynthesisSpec(double)>& spec_for,
                                        double b_max, double b_tol = 1e-3);

}  // namespace safeloop

#endif
