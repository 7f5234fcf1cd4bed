#include "safeloop/numerics.hpp"

#include <stdexcept>

namespace safeloop
{

double inf_norm(const Mat& M)
{
    if (M.rows() == 0 || M.cols() == 0)
    {
        throw std::invalid_argument("inf_norm: empty matrix");
    }
    if (M.rows() == 1 || M.cols() == 1)
    {
        return M.cwiseAbs().maxCoeff();
    }
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

Vec vectorize(const Mat& M)
{
    Vec v(M.size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < M.cols(); ++j)
    {
        v.segment(k, M.rows()) = M.col(j);
        k += M.rows();
    }
    return v;
}

Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols)
{
    if (v.size() != rows * cols)
    {
        throw std::invalid_argument("unvectorize: size mismatch");
    }
    Mat M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
    {
        M.col(j) = v.segment(j * rows, rows);
    }
    return M;
}

bool row_rank_full(const Mat& M, double tol)
{
    if (tol <= 0.0)
    {
        throw std::invalid_argument("row_rank_full: tol must be positive");
    }
    if (M.rows() == 0)
    {
        return true;
    }
    if (M.cols() < M.rows())
    {
        return false;
    }
    Eigen::JacobiSVD<Mat> svd(M);
    const Vec& sv = svd.singularValues();
    const double thresh = tol * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
    {
        if (sv(i) > thresh)
        {
            ++rank;
        }
    }
    return rank == M.rows();
}

Mat right_inverse(const Mat& M, double tol)
{
    if (!row_rank_full(M, tol))
    {
        throw std::invalid_argument("right_inverse: matrix is not full row rank");
    }
    // minimum-norm solution M^T (M M^T)^{-1}
    const Mat MMt = M * M.transpose();
    return M.transpose() * MMt.ldlt().solve(Mat::Identity(M.rows(), M.rows()));
}

}  // namespace safeloop
