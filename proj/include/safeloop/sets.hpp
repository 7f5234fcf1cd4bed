#ifndef SAFELOOP_SETS_HPP_
#define SAFELOOP_SETS_HPP_

#include <optional>
#include <vector>

#include "safeloop/lp.hpp"
#include "safeloop/numerics.hpp"

namespace safeloop
{

/// Z = {G*zeta + c : ||zeta||_inf <= 1}
struct Zonotope
{
    Vec c;
    Mat G;

    Eigen::Index dim() const { return c.size(); }
    Eigen::Index num_gens() const { return G.cols(); }
};

/// C = {G*zeta + c : ||zeta||_inf <= 1, A*zeta = b}. q = 0 rows of A makes
/// this a plain zonotope.
struct ConZonotope
{
    Vec c;
    Mat G;
    Mat A;  // q x s
    Vec b;  // q

    ConZonotope() = default;
    ConZonotope(Vec c_, Mat G_);
    ConZonotope(Vec c_, Mat G_, Mat A_, Vec b_);

    Eigen::Index dim() const { return c.size(); }
    Eigen::Index num_gens() const { return G.cols(); }
    Eigen::Index num_cons() const { return A.rows(); }
};

/// M = {sum_i G[i]*zeta_i + C : ||zeta||_inf <= 1}
struct MatrixZonotope
{
    Mat C;
    std::vector<Mat> G;

    Eigen::Index num_gens() const { return static_cast<Eigen::Index>(G.size()); }
};

/// K = {sum_i G[i]*zeta_i + C : sum_i Ac[i]*zeta_i = Bc, ||zeta||_inf <= 1}.
/// Ac has one block per generator (same count as G); the blocks share the
/// shape of Bc, which need not match the shape of C.
struct ConMatrixZonotope
{
    Mat C;
    std::vector<Mat> G;
    std::vector<Mat> Ac;
    Mat Bc;

    ConMatrixZonotope() = default;
    ConMatrixZonotope(Mat C_, std::vector<Mat> G_);
    ConMatrixZonotope(Mat C_, std::vector<Mat> G_, std::vector<Mat> Ac_, Mat Bc_);

    Eigen::Index num_gens() const { return static_cast<Eigen::Index>(G.size()); }
    Eigen::Index rows() const { return C.rows(); }
    Eigen::Index cols() const { return C.cols(); }
};

/// P = {x : H x <= h}
struct Polytope
{
    Mat H;
    Vec h;
};

ConZonotope to_constrained(const Zonotope& Z);
ConMatrixZonotope to_constrained(const MatrixZonotope& M);

/// Axis-aligned box as a zonotope. Zero-width coordinates keep their (zero)
/// generator so downstream constraint columns stay aligned.
Zonotope from_box(const Vec& lower, const Vec& upper);

/// Entrywise interval matrix as a matrix zonotope: one single-entry generator
/// per interval of nonzero width, ordered row-major. Exact entries are skipped.
MatrixZonotope interval_matrix_zonotope(const Mat& lower, const Mat& upper);

ConZonotope minkowski_sum(const ConZonotope& C1, const ConZonotope& C2);

/// {X*N : X in M} for a matrix N; constraints carry over unchanged.
ConMatrixZonotope map(const ConMatrixZonotope& M, const Mat& N);

/// {X*n : X in M} for a vector n; matrix constraints flatten to Vec form.
ConZonotope map_to_vector(const ConMatrixZonotope& M, const Vec& n);

/// T-concatenation of Zw: the set of n x T matrices whose columns are
/// independent members of Zw. Generators are ordered (column t, generator i)
/// lexicographic with t outermost.
ConMatrixZonotope concat_T(const ConZonotope& Zw, int T);

/// Generalized intersection of two constrained matrix zonotopes with equal
/// center shape; M1's generators survive. Both operands must have constraint
/// blocks with as many columns as the center (or no constraints).
ConMatrixZonotope intersect(const ConMatrixZonotope& M1, const ConMatrixZonotope& M2);

/// {<lambda*G, c, A, lambda*b>}: the lambda-scaled level set, boundaries
/// scaled about the center.
ConZonotope scale_level_set(const ConZonotope& C, double lambda);

/// Over-approximation of {X*x : X in M, x in C}. Cross terms between the two
/// factor vectors become fresh unconstrained factors, ordered (i, j) with the
/// matrix-set generator index i outermost.
ConZonotope product(const ConMatrixZonotope& M, const ConZonotope& C);

/// Drop generator columns that are zero in both the generator matrix and the
/// constraint matrix.
ConZonotope prune_zero_columns(const ConZonotope& C);

struct Membership
{
    bool member = false;
    double residual = 0;
    Vec witness;  // factor vector, valid when member
};

/// LP feasibility of the defining conditions, to within tol.
Membership member_point(const ConZonotope& S, const Vec& x, double tol = 1e-7);
Membership member_matrix(const ConMatrixZonotope& S, const Mat& X, double tol = 1e-7);

struct ContainmentCert
{
    Mat Gamma;
    Vec L;
    Mat P;
};

/// Sufficient LP certificate for inner being a subset of outer; nullopt means
/// no certificate was found, not proven non-containment.
std::optional<ContainmentCert> contains(const ConZonotope& inner, const ConZonotope& outer,
                                        double tol = 1e-7);

// flattened views used by membership, sampling and the synthesis programs
Mat stacked_generator_matrix(const ConMatrixZonotope& M);   // vec(G_i) as columns
Mat stacked_constraint_matrix(const ConMatrixZonotope& M);  // vec(Ac_i) as columns
Vec stacked_constraint_rhs(const ConMatrixZonotope& M);     // vec(Bc)

}  // namespace safeloop

#endif
