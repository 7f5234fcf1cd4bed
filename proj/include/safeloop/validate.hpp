#ifndef SAFELOOP_VALIDATE_HPP_
#define SAFELOOP_VALIDATE_HPP_

#include <cstdint>
#include <string>

#include "safeloop/data.hpp"
#include "safeloop/sampling.hpp"
#include "safeloop/sets.hpp"

namespace safeloop
{

struct ValidationReport
{
    std::string method;
    double lambda = 1.0;
    long tested = 0;
    long violations = 0;
    double worst_margin = 0.0;  ///< min over tests of lambda*h_j - H_j x+
    double runtime_seconds = 0.0;
    bool enumeration_skipped = false;  ///< extreme-point blow-up, sampled only

    bool pass() const { return violations == 0; }
};

/// Does the true closed loop map the safe polytope into its lambda-scaled
/// copy for every admissible disturbance? Checks polytope vertices against
/// disturbance extreme points when enumerable, plus N random pairs.
ValidationReport check_contractive(const LinearSystem& sys, const Mat& K, const Polytope& safe,
                                   const ConZonotope& Zw, double lambda, long N,
                                   std::uint64_t seed, double tol = 1e-8);

/// Do random closed-loop trajectories started in the safe set stay inside it
/// for the whole horizon?
ValidationReport check_ris(const LinearSystem& sys, const Mat& K, const Polytope& safe,
                           const ConZonotope& Zw, int horizon, long N, std::uint64_t seed,
                           double tol = 1e-8);

struct OracleOutcome
{
    bool certificate_consistent = true;
    std::optional<Vec> counterexample;
};

/// Sample N members of C1 and test each for membership in C2. Any failure is
/// a counterexample disproving containment; no failure proves nothing.
OracleOutcome oracle_containment(const ConZonotope& C1, const ConZonotope& C2, long N,
                                 std::uint64_t seed, double tol = 1e-7);

/// All vertices of a bounded polytope by basis enumeration; intended for
/// small instances (n <= 3, few rows).
std::vector<Vec> polytope_vertices(const Polytope& P, double tol = 1e-9);

/// Uniform sample by rejection from the bounding box.
Vec sample_polytope(const Polytope& P, Rng& rng);

/// Extreme points c + G*sigma, sigma in {-1,1}^s, for unconstrained sets with
/// few generators; empty when enumeration is not practical.
std::vector<Vec> zonotope_extremes(const ConZonotope& Z, int max_gens = 12);

}  // namespace safeloop

#endif
