#ifndef SAFELOOP_NUMERICS_HPP_
#define SAFELOOP_NUMERICS_HPP_

#include <Eigen/Dense>

namespace safeloop
{

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Infinity norm. For a proper matrix this is the maximum absolute row sum;
/// a row or column vector is treated as a vector (maximum absolute entry).
double inf_norm(const Mat& M);

/// Column vector obtained by vertically stacking the columns of M.
Vec vectorize(const Mat& M);

/// Inverse of vectorize for a known target shape.
Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols);

/// True iff the numerical rank of M (singular values above tol relative to
/// the largest one) equals the number of rows.
bool row_rank_full(const Mat& M, double tol = 1e-9);

/// Minimum-norm right inverse R with M*R = I. Throws if M is not full row rank.
Mat right_inverse(const Mat& M, double tol = 1e-9);

}  // namespace safeloop

#endif
