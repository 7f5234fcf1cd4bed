#include "safeloop/sets.hpp"

#include <cmath>
#include <stdexcept>

namespace safeloop
{

namespace
{
void check_finite(const Mat& M, const char* what)
{
    if (!M.allFinite())
    {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}
}  // namespace

ConZonotope::ConZonotope(Vec c_, Mat G_)
    : c(std::move(c_)), G(std::move(G_)), A(0, G.cols()), b(0)
{
    if (G.rows() != c.size())
    {
        throw std::invalid_argument("ConZonotope: generator rows must match center length");
    }
}

ConZonotope::ConZonotope(Vec c_, Mat G_, Mat A_, Vec b_)
    : c(std::move(c_)), G(std::move(G_)), A(std::move(A_)), b(std::move(b_))
{
    if (G.rows() != c.size())
    {
        throw std::invalid_argument("ConZonotope: generator rows must match center length");
    }
    if (A.cols() != G.cols())
    {
        throw std::invalid_argument("ConZonotope: constraint columns must match generator count");
    }
    if (A.rows() != b.size())
    {
        throw std::invalid_argument("ConZonotope: constraint rows must match rhs length");
    }
}

ConMatrixZonotope::ConMatrixZonotope(Mat C_, std::vector<Mat> G_)
    : C(std::move(C_)), G(std::move(G_)), Ac(), Bc(0, C.cols())
{
    for (const auto& Gi : G)
    {
        if (Gi.rows() != C.rows() || Gi.cols() != C.cols())
        {
            throw std::invalid_argument("ConMatrixZonotope: generator shape mismatch");
        }
    }
    Ac.assign(G.size(), Mat::Zero(0, C.cols()));
}

ConMatrixZonotope::ConMatrixZonotope(Mat C_, std::vector<Mat> G_, std::vector<Mat> Ac_, Mat Bc_)
    : C(std::move(C_)), G(std::move(G_)), Ac(std::move(Ac_)), Bc(std::move(Bc_))
{
    for (const auto& Gi : G)
    {
        if (Gi.rows() != C.rows() || Gi.cols() != C.cols())
        {
            throw std::invalid_argument("ConMatrixZonotope: generator shape mismatch");
        }
    }
    if (Ac.size() != G.size())
    {
        throw std::invalid_argument(
            "ConMatrixZonotope: constraint block count must match generator count");
    }
    for (const auto& Ai : Ac)
    {
        if (Ai.rows() != Bc.rows() || Ai.cols() != Bc.cols())
        {
            throw std::invalid_argument("ConMatrixZonotope: constraint block shape mismatch");
        }
    }
}

ConZonotope to_constrained(const Zonotope& Z)
{
    return ConZonotope(Z.c, Z.G);
}

ConMatrixZonotope to_constrained(const MatrixZonotope& M)
{
    return ConMatrixZonotope(M.C, M.G);
}

Zonotope from_box(const Vec& lower, const Vec& upper)
{
    if (lower.size() != upper.size())
    {
        throw std::invalid_argument("from_box: dimension mismatch");
    }
    if ((lower.array() > upper.array()).any())
    {
        throw std::invalid_argument("from_box: lower exceeds upper");
    }
    Zonotope Z;
    Z.c = 0.5 * (lower + upper);
    Z.G = (0.5 * (upper - lower)).asDiagonal();
    return Z;
}

MatrixZonotope interval_matrix_zonotope(const Mat& lower, const Mat& upper)
{
    if (lower.rows() != upper.rows() || lower.cols() != upper.cols())
    {
        throw std::invalid_argument("interval_matrix_zonotope: shape mismatch");
    }
    if ((lower.array() > upper.array()).any())
    {
        throw std::invalid_argument("interval_matrix_zonotope: lower exceeds upper");
    }
    MatrixZonotope M;
    M.C = 0.5 * (lower + upper);
    // row-major over entries, exact entries skipped
    for (Eigen::Index i = 0; i < lower.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < lower.cols(); ++j)
        {
            const double hw = 0.5 * (upper(i, j) - lower(i, j));
            if (hw > 0.0)
            {
                Mat Gi = Mat::Zero(lower.rows(), lower.cols());
                Gi(i, j) = hw;
                M.G.push_back(std::move(Gi));
            }
        }
    }
    return M;
}

ConZonotope minkowski_sum(const ConZonotope& C1, const ConZonotope& C2)
{
    if (C1.dim() != C2.dim())
    {
        throw std::invalid_argument("minkowski_sum: dimension mismatch");
    }
    const Eigen::Index s1 = C1.num_gens(), s2 = C2.num_gens();
    const Eigen::Index q1 = C1.num_cons(), q2 = C2.num_cons();
    ConZonotope R;
    R.c = C1.c + C2.c;
    R.G.resize(C1.dim(), s1 + s2);
    R.G << C1.G, C2.G;
    R.A = Mat::Zero(q1 + q2, s1 + s2);
    R.A.topLeftCorner(q1, s1) = C1.A;
    R.A.bottomRightCorner(q2, s2) = C2.A;
    R.b.resize(q1 + q2);
    R.b << C1.b, C2.b;
    return R;
}

ConMatrixZonotope map(const ConMatrixZonotope& M, const Mat& N)
{
    if (M.cols() != N.rows())
    {
        throw std::invalid_argument("map: inner dimensions disagree");
    }
    ConMatrixZonotope R;
    R.C = M.C * N;
    R.G.reserve(M.G.size());
    for (const auto& Gi : M.G)
    {
        R.G.push_back(Gi * N);
    }
    R.Ac = M.Ac;
    R.Bc = M.Bc;
    if (R.Bc.rows() == 0)  // normalize empty constraints to the new width
    {
        R.Bc.resize(0, R.C.cols());
        R.Ac.assign(R.G.size(), Mat::Zero(0, R.C.cols()));
    }
    return R;
}

ConZonotope map_to_vector(const ConMatrixZonotope& M, const Vec& n)
{
    if (M.cols() != n.size())
    {
        throw std::invalid_argument("map_to_vector: inner dimensions disagree");
    }
    const Eigen::Index s = M.num_gens();
    ConZonotope R;
    R.c = M.C * n;
    R.G.resize(M.rows(), s);
    for (Eigen::Index i = 0; i < s; ++i)
    {
        R.G.col(i) = M.G[static_cast<size_t>(i)] * n;
    }
    R.A = stacked_constraint_matrix(M);
    R.b = stacked_constraint_rhs(M);
    return R;
}

ConMatrixZonotope concat_T(const ConZonotope& Zw, int T)
{
    if (T < 1)
    {
        throw std::invalid_argument("concat_T: T must be at least 1");
    }
    const Eigen::Index n = Zw.dim();
    const Eigen::Index sw = Zw.num_gens();
    const Eigen::Index nw = Zw.num_cons();
    ConMatrixZonotope R;
    R.C = Zw.c.replicate(1, T);
    R.Bc = Zw.b.replicate(1, T);
    R.G.reserve(static_cast<size_t>(T * sw));
    R.Ac.reserve(static_cast<size_t>(T * sw));
    for (int t = 0; t < T; ++t)
    {
        for (Eigen::Index i = 0; i < sw; ++i)
        {
            Mat Gi = Mat::Zero(n, T);
            Gi.col(t) = Zw.G.col(i);
            R.G.push_back(std::move(Gi));
            Mat Ai = Mat::Zero(nw, T);
            Ai.col(t) = Zw.A.col(i);
            R.Ac.push_back(std::move(Ai));
        }
    }
    return R;
}

ConMatrixZonotope intersect(const ConMatrixZonotope& M1, const ConMatrixZonotope& M2)
{
    if (M1.rows() != M2.rows() || M1.cols() != M2.cols())
    {
        throw std::invalid_argument("intersect: center shapes differ");
    }
    const Eigen::Index p = M1.cols();
    for (const auto* M : {&M1, &M2})
    {
        if (M->Bc.rows() > 0 && M->Bc.cols() != p)
        {
            throw std::invalid_argument(
                "intersect: constraint blocks must have as many columns as the center");
        }
    }
    const Eigen::Index n = M1.rows();
    const Eigen::Index s1 = M1.num_gens(), s2 = M2.num_gens();
    const Eigen::Index q1 = M1.Bc.rows(), q2 = M2.Bc.rows();
    const Eigen::Index qr = q1 + q2 + n;

    ConMatrixZonotope R;
    R.C = M1.C;
    R.G.reserve(static_cast<size_t>(s1 + s2));
    for (const auto& Gi : M1.G)
    {
        R.G.push_back(Gi);
    }
    for (Eigen::Index i = 0; i < s2; ++i)
    {
        R.G.push_back(Mat::Zero(n, p));
    }
    R.Bc = Mat::Zero(qr, p);
    R.Bc.topRows(q1) = M1.Bc;
    R.Bc.middleRows(q1, q2) = M2.Bc;
    R.Bc.bottomRows(n) = M2.C - M1.C;
    R.Ac.reserve(static_cast<size_t>(s1 + s2));
    for (Eigen::Index i = 0; i < s1; ++i)
    {
        Mat Ai = Mat::Zero(qr, p);
        if (q1 > 0)
        {
            Ai.topRows(q1) = M1.Ac[static_cast<size_t>(i)];
        }
        Ai.bottomRows(n) = M1.G[static_cast<size_t>(i)];
        R.Ac.push_back(std::move(Ai));
    }
    for (Eigen::Index i = 0; i < s2; ++i)
    {
        Mat Ai = Mat::Zero(qr, p);
        if (q2 > 0)
        {
            Ai.middleRows(q1, q2) = M2.Ac[static_cast<size_t>(i)];
        }
        Ai.bottomRows(n) = -M2.G[static_cast<size_t>(i)];
        R.Ac.push_back(std::move(Ai));
    }
    return R;
}

ConZonotope scale_level_set(const ConZonotope& C, double lambda)
{
    if (!(lambda > 0.0 && lambda <= 1.0))
    {
        throw std::invalid_argument("scale_level_set: lambda must be in (0,1]");
    }
    return ConZonotope(C.c, lambda * C.G, C.A, lambda * C.b);
}

ConZonotope product(const ConMatrixZonotope& M, const ConZonotope& C)
{
    if (M.cols() != C.dim())
    {
        throw std::invalid_argument("product: shape disagreement");
    }
    const Eigen::Index n = M.rows();
    const Eigen::Index s = M.num_gens();
    const Eigen::Index sx = C.num_gens();
    const Eigen::Index qm = M.Bc.size();  // vectorized constraint rows
    const Eigen::Index qx = C.num_cons();

    ConZonotope R;
    R.c = M.C * C.c;
    R.G.resize(n, s + sx + s * sx);
    for (Eigen::Index i = 0; i < s; ++i)
    {
        R.G.col(i) = M.G[static_cast<size_t>(i)] * C.c;
    }
    R.G.middleCols(s, sx) = M.C * C.G;
    for (Eigen::Index i = 0; i < s; ++i)  // cross terms, (i, j) with i outermost
    {
        R.G.middleCols(s + sx + i * sx, sx) = M.G[static_cast<size_t>(i)] * C.G;
    }
    R.A = Mat::Zero(qm + qx, s + sx + s * sx);
    R.A.topLeftCorner(qm, s) = stacked_constraint_matrix(M);
    R.A.block(qm, s, qx, sx) = C.A;
    R.b.resize(qm + qx);
    R.b << stacked_constraint_rhs(M), C.b;
    return R;
}

ConZonotope prune_zero_columns(const ConZonotope& C)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < C.num_gens(); ++j)
    {
        const bool zero_gen = C.G.col(j).isZero(0.0);
        const bool zero_con = C.num_cons() == 0 || C.A.col(j).isZero(0.0);
        if (!(zero_gen && zero_con))
        {
            keep.push_back(j);
        }
    }
    ConZonotope R;
    R.c = C.c;
    R.G.resize(C.dim(), static_cast<Eigen::Index>(keep.size()));
    R.A.resize(C.num_cons(), static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k)
    {
        R.G.col(static_cast<Eigen::Index>(k)) = C.G.col(keep[k]);
        R.A.col(static_cast<Eigen::Index>(k)) = C.A.col(keep[k]);
    }
    R.b = C.b;
    return R;
}

Mat stacked_generator_matrix(const ConMatrixZonotope& M)
{
    Mat G(M.rows() * M.cols(), M.num_gens());
    for (Eigen::Index i = 0; i < M.num_gens(); ++i)
    {
        G.col(i) = vectorize(M.G[static_cast<size_t>(i)]);
    }
    return G;
}

Mat stacked_constraint_matrix(const ConMatrixZonotope& M)
{
    Mat A(M.Bc.size(), M.num_gens());
    for (Eigen::Index i = 0; i < M.num_gens(); ++i)
    {
        A.col(i) = vectorize(M.Ac[static_cast<size_t>(i)]);
    }
    return A;
}

Vec stacked_constraint_rhs(const ConMatrixZonotope& M)
{
    return vectorize(M.Bc);
}

namespace
{
// feasibility of {G*zeta = d, A*zeta = b, ||zeta||_inf <= 1} to within tol,
// decided by minimizing the worst equation violation
Membership member_core(const Mat& G, const Vec& d, const Mat& A, const Vec& b, double tol)
{
    check_finite(G, "membership");
    const Eigen::Index s = G.cols();
    if (s == 0)
    {
        Membership r;
        double res = d.size() > 0 ? d.cwiseAbs().maxCoeff() : 0.0;
        if (b.size() > 0)
        {
            res = std::max(res, b.cwiseAbs().maxCoeff());
        }
        r.residual = res;
        r.member = res <= tol;
        r.witness = Vec(0);
        return r;
    }
    LpProblem prob;
    const VarBlock z = prob.add_block("zeta", static_cast<int>(s), 1, -1.0, 1.0);
    const VarBlock t = prob.add_block("t", 1, 1, 0.0, kInf);
    auto add_abs_rows = [&](const Mat& Mx, const Vec& rhs) {
        for (Eigen::Index k = 0; k < Mx.rows(); ++k)
        {
            LinExpr e;
            for (Eigen::Index j = 0; j < s; ++j)
            {
                if (Mx(k, j) != 0.0)
                {
                    e += LinExpr::var(z(static_cast<int>(j)), Mx(k, j));
                }
            }
            prob.add_ineq(e - LinExpr::var(t(0)), rhs(k));
            prob.add_ineq(LinExpr(rhs(k)) - e - LinExpr::var(t(0)), 0.0);
        }
    };
    add_abs_rows(G, d);
    add_abs_rows(A, b);
    prob.set_objective(LinExpr::var(t(0)));
    const LpSolution sol = solve(prob, tol);
    Membership r;
    if (sol.status != LpStatus::optimal)
    {
        throw std::runtime_error(std::string("membership LP failed: ") + to_string(sol.status));
    }
    r.residual = sol.objective;
    r.member = sol.objective <= tol;
    r.witness = sol.x.head(s);
    return r;
}
}  // namespace

Membership member_point(const ConZonotope& S, const Vec& x, double tol)
{
    if (x.size() != S.dim())
    {
        throw std::invalid_argument("member_point: dimension mismatch");
    }
    return member_core(S.G, Vec(x - S.c), S.A, S.b, tol);
}

Membership member_matrix(const ConMatrixZonotope& S, const Mat& X, double tol)
{
    if (X.rows() != S.rows() || X.cols() != S.cols())
    {
        throw std::invalid_argument("member_matrix: shape mismatch");
    }
    return member_core(stacked_generator_matrix(S), vectorize(X - S.C),
                       stacked_constraint_matrix(S), stacked_constraint_rhs(S), tol);
}

std::optional<ContainmentCert> contains(const ConZonotope& inner, const ConZonotope& outer,
                                        double tol)
{
    if (inner.dim() != outer.dim())
    {
        throw std::invalid_argument("contains: dimension mismatch");
    }
    const Eigen::Index s1 = inner.num_gens(), s2 = outer.num_gens();
    const Eigen::Index q1 = inner.num_cons(), q2 = outer.num_cons();

    LpProblem prob;
    const VarBlock gamma = prob.add_block("Gamma", static_cast<int>(s2), static_cast<int>(s1));
    const VarBlock L = prob.add_block("L", static_cast<int>(s2), 1);
    const VarBlock P = prob.add_block("P", static_cast<int>(q2), static_cast<int>(q1));
    const ExprMat Gamma_e = ExprMat::from_block(gamma);
    const ExprMat L_e = ExprMat::from_block(L);
    const ExprMat P_e = ExprMat::from_block(P);

    // c2 - c1 = G2 L
    prob.add_eq(outer.G * L_e, Mat(outer.c - inner.c));
    // G1 = G2 Gamma
    prob.add_eq(outer.G * Gamma_e, inner.G);
    if (q2 > 0)
    {
        // P A1 = A2 Gamma ; P b1 = b2 + A2 L
        prob.add_eq(P_e * inner.A - outer.A * Gamma_e, Mat::Zero(q2, s1));
        ExprMat rhs = outer.A * L_e;
        for (Eigen::Index k = 0; k < q2; ++k)
        {
            rhs.at(k, 0) += LinExpr(outer.b(k));
        }
        prob.add_eq(P_e * Mat(inner.b) - rhs, Mat::Zero(q2, 1));
    }
    // |Gamma| 1 + |L| <= 1
    std::vector<std::vector<LinExpr>> rows(static_cast<size_t>(s2));
    std::vector<LinExpr> rhs(static_cast<size_t>(s2), LinExpr(1.0));
    for (Eigen::Index k = 0; k < s2; ++k)
    {
        auto& row = rows[static_cast<size_t>(k)];
        for (Eigen::Index j = 0; j < s1; ++j)
        {
            row.push_back(LinExpr::var(gamma(static_cast<int>(k), static_cast<int>(j))));
        }
        row.push_back(LinExpr::var(L(static_cast<int>(k))));
    }
    add_abs_row_bound(prob, rows, rhs);

    const LpSolution sol = solve(prob, tol);
    if (sol.status != LpStatus::optimal)
    {
        return std::nullopt;
    }
    ContainmentCert cert;
    cert.Gamma = sol.block(prob, "Gamma");
    cert.L = sol.block(prob, "L");
    cert.P = sol.block(prob, "P");
    return cert;
}

}  // namespace safeloop
