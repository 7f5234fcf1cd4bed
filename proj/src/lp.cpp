#include "safeloop/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace safeloop
{

namespace
{
void append_scaled(std::vector<std::pair<int, double>>& dst,
                   const std::vector<std::pair<int, double>>& src, double a)
{
    for (const auto& [idx, coeff] : src)
    {
        dst.emplace_back(idx, a * coeff);
    }
}

// merge duplicate indices, drop exact zeros
void compress(std::vector<std::pair<int, double>>& terms)
{
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t out = 0;
    for (size_t i = 0; i < terms.size();)
    {
        int idx = terms[i].first;
        double sum = 0;
        while (i < terms.size() && terms[i].first == idx)
        {
            sum += terms[i].second;
            ++i;
        }
        if (sum != 0.0)
        {
            terms[out++] = {idx, sum};
        }
    }
    terms.resize(out);
}
}  // namespace

LinExpr& LinExpr::operator+=(const LinExpr& other)
{
    append_scaled(terms, other.terms, 1.0);
    constant += other.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other)
{
    append_scaled(terms, other.terms, -1.0);
    constant -= other.constant;
    return *this;
}

LinExpr& LinExpr::operator*=(double a)
{
    for (auto& t : terms)
    {
        t.second *= a;
    }
    constant *= a;
    return *this;
}

LinExpr operator+(LinExpr a, const LinExpr& b)
{
    a += b;
    return a;
}

LinExpr operator-(LinExpr a, const LinExpr& b)
{
    a -= b;
    return a;
}

LinExpr operator*(double a, LinExpr e)
{
    e *= a;
    return e;
}

ExprMat ExprMat::from_block(const VarBlock& b)
{
    ExprMat E(b.rows, b.cols);
    for (int i = 0; i < b.rows; ++i)
    {
        for (int j = 0; j < b.cols; ++j)
        {
            E.at(i, j) = LinExpr::var(b(i, j));
        }
    }
    return E;
}

ExprMat ExprMat::constant(const Mat& M)
{
    ExprMat E(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < M.cols(); ++j)
        {
            E.at(i, j) = LinExpr(M(i, j));
        }
    }
    return E;
}

ExprMat ExprMat::col(Eigen::Index j) const
{
    ExprMat E(rows_, 1);
    for (Eigen::Index i = 0; i < rows_; ++i)
    {
        E.at(i, 0) = at(i, j);
    }
    return E;
}

ExprMat operator*(const Mat& A, const ExprMat& X)
{
    if (A.cols() != X.rows())
    {
        throw std::invalid_argument("ExprMat: dimension mismatch in A*X");
    }
    ExprMat R(A.rows(), X.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < X.cols(); ++j)
        {
            LinExpr e;
            for (Eigen::Index k = 0; k < A.cols(); ++k)
            {
                if (A(i, k) != 0.0)
                {
                    e += A(i, k) * X.at(k, j);
                }
            }
            R.at(i, j) = std::move(e);
        }
    }
    return R;
}

ExprMat operator*(const ExprMat& X, const Mat& B)
{
    if (X.cols() != B.rows())
    {
        throw std::invalid_argument("ExprMat: dimension mismatch in X*B");
    }
    ExprMat R(X.rows(), B.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < B.cols(); ++j)
        {
            LinExpr e;
            for (Eigen::Index k = 0; k < X.cols(); ++k)
            {
                if (B(k, j) != 0.0)
                {
                    e += B(k, j) * X.at(i, k);
                }
            }
            R.at(i, j) = std::move(e);
        }
    }
    return R;
}

ExprMat operator+(const ExprMat& A, const ExprMat& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
    {
        throw std::invalid_argument("ExprMat: dimension mismatch in A+B");
    }
    ExprMat R(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < A.cols(); ++j)
        {
            R.at(i, j) = A.at(i, j) + B.at(i, j);
        }
    }
    return R;
}

ExprMat operator-(const ExprMat& A, const ExprMat& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
    {
        throw std::invalid_argument("ExprMat: dimension mismatch in A-B");
    }
    ExprMat R(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < A.cols(); ++j)
        {
            R.at(i, j) = A.at(i, j) - B.at(i, j);
        }
    }
    return R;
}

const char* to_string(LpStatus s)
{
    switch (s)
    {
    case LpStatus::optimal:
        return "optimal";
    case LpStatus::infeasible:
        return "infeasible";
    case LpStatus::unbounded:
        return "unbounded";
    default:
        return "numerical-failure";
    }
}

VarBlock LpProblem::add_block(const std::string& name, int rows, int cols, double lo, double hi)
{
    VarBlock b{name, num_vars_, rows, cols};
    num_vars_ += rows * cols;
    lo_.resize(static_cast<size_t>(num_vars_), lo);
    hi_.resize(static_cast<size_t>(num_vars_), hi);
    std::fill(lo_.begin() + b.offset, lo_.end(), lo);
    std::fill(hi_.begin() + b.offset, hi_.end(), hi);
    blocks_.push_back(b);
    return b;
}

void LpProblem::set_bounds(int var, double lo, double hi)
{
    lo_[static_cast<size_t>(var)] = lo;
    hi_[static_cast<size_t>(var)] = hi;
}

void LpProblem::add_eq(const LinExpr& expr, double rhs)
{
    Row r{expr.terms, rhs - expr.constant};
    compress(r.terms);
    eqs_.push_back(std::move(r));
}

void LpProblem::add_ineq(const LinExpr& expr, double rhs)
{
    Row r{expr.terms, rhs - expr.constant};
    compress(r.terms);
    ineqs_.push_back(std::move(r));
}

void LpProblem::add_eq(const ExprMat& E, const Mat& R)
{
    if (E.rows() != R.rows() || E.cols() != R.cols())
    {
        throw std::invalid_argument("LpProblem::add_eq: shape mismatch");
    }
    for (Eigen::Index i = 0; i < E.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < E.cols(); ++j)
        {
            add_eq(E.at(i, j), R(i, j));
        }
    }
}

void LpProblem::set_objective(const LinExpr& expr)
{
    objective_ = expr.terms;
    compress(objective_);
    objective_constant_ = expr.constant;
    has_objective_ = true;
}

Mat LpSolution::block(const LpProblem& prob, const std::string& name) const
{
    for (const auto& b : prob.blocks())
    {
        if (b.name == name)
        {
            Mat M(b.rows, b.cols);
            for (int i = 0; i < b.rows; ++i)
            {
                for (int j = 0; j < b.cols; ++j)
                {
                    M(i, j) = x(b(i, j));
                }
            }
            return M;
        }
    }
    throw std::invalid_argument("LpSolution::block: unknown block " + name);
}

namespace
{

constexpr double kPivTol = 1e-9;
constexpr double kRcTol = 1e-9;

struct Simplex
{
    Mat A;  // m x n, kept as B^{-1} A
    Vec b;  // B^{-1} b, >= 0
    std::vector<int> basis;
    long iterations = 0;
    long max_iterations = 0;
    long bland_after = 0;

    // Price, pivot, repeat. allowed_cols limits the entering choice
    // (phase 2 must not re-enter artificials).
    LpStatus run(const Vec& c, int allowed_cols)
    {
        const Eigen::Index m = A.rows();
        Vec rc = c;
        for (Eigen::Index i = 0; i < m; ++i)
        {
            const double cb = c(basis[static_cast<size_t>(i)]);
            if (cb != 0.0)
            {
                rc -= cb * A.row(i).transpose();
            }
        }
        while (true)
        {
            if (++iterations > max_iterations)
            {
                return LpStatus::numerical_failure;
            }
            // entering column
            int enter = -1;
            if (iterations <= bland_after)
            {
                double best = -kRcTol;
                for (int j = 0; j < allowed_cols; ++j)
                {
                    if (rc(j) < best)
                    {
                        best = rc(j);
                        enter = j;
                    }
                }
            }
            else  // Bland's rule
            {
                for (int j = 0; j < allowed_cols; ++j)
                {
                    if (rc(j) < -kRcTol)
                    {
                        enter = j;
                        break;
                    }
                }
            }
            if (enter < 0)
            {
                return LpStatus::optimal;
            }
            // ratio test
            int leave = -1;
            double best_ratio = kInf;
            for (Eigen::Index i = 0; i < m; ++i)
            {
                const double a = A(i, enter);
                if (a > kPivTol)
                {
                    const double ratio = b(i) / a;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && leave >= 0 &&
                         basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))
                    {
                        best_ratio = ratio;
                        leave = static_cast<int>(i);
                    }
                }
            }
            if (leave < 0)
            {
                return LpStatus::unbounded;
            }
            pivot(leave, enter);
            rc -= rc(enter) * A.row(leave).transpose();
        }
    }

    void pivot(int row, int col)
    {
        const double p = A(row, col);
        A.row(row) /= p;
        b(row) /= p;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
        {
            if (i == row)
            {
                continue;
            }
            const double f = A(i, col);
            if (f != 0.0)
            {
                A.row(i) -= f * A.row(row);
                b(i) -= f * b(row);
                if (b(i) < 0.0 && b(i) > -1e-11)
                {
                    b(i) = 0.0;
                }
            }
        }
        basis[static_cast<size_t>(row)] = col;
    }
};

// How each original variable maps onto nonnegative standard-form columns.
struct VarMap
{
    enum Kind
    {
        shifted_lo,   // x = lo + y
        negated_hi,   // x = hi - y
        split         // x = p - q
    } kind;
    int col_p = -1;
    int col_q = -1;
    double shift = 0;
};

}  // namespace

LpSolution solve(const LpProblem& prob, double tol)
{
    LpSolution sol;
    const int nvars = prob.num_vars();
    const auto& lo = prob.lower();
    const auto& hi = prob.upper();

    // standard-form columns for the original variables
    std::vector<VarMap> vmap(static_cast<size_t>(nvars));
    int ncols = 0;
    std::vector<std::pair<int, double>> upper_rows;  // (std col, bound) y <= bound
    for (int j = 0; j < nvars; ++j)
    {
        VarMap& v = vmap[static_cast<size_t>(j)];
        if (lo[static_cast<size_t>(j)] > -kInf)
        {
            v.kind = VarMap::shifted_lo;
            v.shift = lo[static_cast<size_t>(j)];
            v.col_p = ncols++;
            if (hi[static_cast<size_t>(j)] < kInf)
            {
                upper_rows.emplace_back(v.col_p, hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)]);
            }
        }
        else if (hi[static_cast<size_t>(j)] < kInf)
        {
            v.kind = VarMap::negated_hi;
            v.shift = hi[static_cast<size_t>(j)];
            v.col_p = ncols++;
        }
        else
        {
            v.kind = VarMap::split;
            v.col_p = ncols++;
            v.col_q = ncols++;
        }
    }

    const size_t n_eq = prob.equalities().size();
    const size_t n_ineq = prob.inequalities().size() + upper_rows.size();
    const Eigen::Index m = static_cast<Eigen::Index>(n_eq + n_ineq);
    const int n_slack = static_cast<int>(n_ineq);
    const int n_total = ncols + n_slack + static_cast<int>(m);  // + artificials

    Mat A = Mat::Zero(m, n_total);
    Vec b = Vec::Zero(m);

    auto emit_row = [&](Eigen::Index r, const LpProblem::Row& row) {
        double rhs = row.rhs;
        for (const auto& [idx, coeff] : row.terms)
        {
            const VarMap& v = vmap[static_cast<size_t>(idx)];
            switch (v.kind)
            {
            case VarMap::shifted_lo:
                A(r, v.col_p) += coeff;
                rhs -= coeff * v.shift;
                break;
            case VarMap::negated_hi:
                A(r, v.col_p) -= coeff;
                rhs -= coeff * v.shift;
                break;
            case VarMap::split:
                A(r, v.col_p) += coeff;
                A(r, v.col_q) -= coeff;
                break;
            }
        }
        b(r) = rhs;
    };

    Eigen::Index r = 0;
    for (const auto& row : prob.equalities())
    {
        emit_row(r++, row);
    }
    for (const auto& row : prob.inequalities())
    {
        emit_row(r, row);
        A(r, ncols + static_cast<int>(r - n_eq)) = 1.0;  // slack
        ++r;
    }
    for (const auto& [col, bound] : upper_rows)
    {
        A(r, col) = 1.0;
        A(r, ncols + static_cast<int>(r - n_eq)) = 1.0;
        b(r) = bound;
        ++r;
    }

    // row equilibration, then flip rows to make b nonnegative
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const double scale = A.row(i).head(ncols + n_slack).cwiseAbs().maxCoeff();
        if (scale > 0.0)
        {
            A.row(i).head(ncols + n_slack) /= scale;
            b(i) /= scale;
        }
        if (b(i) < 0.0)
        {
            A.row(i).head(ncols + n_slack) *= -1.0;
            b(i) = -b(i);
        }
        A(i, ncols + n_slack + static_cast<int>(i)) = 1.0;  // artificial
    }

    Simplex sx;
    sx.A = std::move(A);
    sx.b = std::move(b);
    sx.basis.resize(static_cast<size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
    {
        sx.basis[static_cast<size_t>(i)] = ncols + n_slack + static_cast<int>(i);
    }
    sx.max_iterations = 400L * (m + n_total) + 2000;
    sx.bland_after = 20L * (m + n_total) + 500;

    // phase 1
    Vec c1 = Vec::Zero(n_total);
    c1.tail(m).setOnes();
    LpStatus st = sx.run(c1, n_total);
    if (st == LpStatus::numerical_failure)
    {
        sol.status = st;
        return sol;
    }
    double phase1_obj = 0;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        if (sx.basis[static_cast<size_t>(i)] >= ncols + n_slack)
        {
            phase1_obj += sx.b(i);
        }
    }
    const double b_scale = m > 0 ? sx.b.cwiseAbs().maxCoeff() : 0.0;
    if (phase1_obj > tol * (1.0 + b_scale))
    {
        sol.status = LpStatus::infeasible;
        return sol;
    }
    // drive basic artificials out where possible
    for (Eigen::Index i = 0; i < m; ++i)
    {
        if (sx.basis[static_cast<size_t>(i)] < ncols + n_slack)
        {
            continue;
        }
        for (int j = 0; j < ncols + n_slack; ++j)
        {
            if (std::abs(sx.A(i, j)) > 1e-7)
            {
                sx.pivot(static_cast<int>(i), j);
                break;
            }
        }
    }

    // phase 2
    Vec c2 = Vec::Zero(n_total);
    for (const auto& [idx, coeff] : prob.objective())
    {
        const VarMap& v = vmap[static_cast<size_t>(idx)];
        switch (v.kind)
        {
        case VarMap::shifted_lo:
            c2(v.col_p) += coeff;
            break;
        case VarMap::negated_hi:
            c2(v.col_p) -= coeff;
            break;
        case VarMap::split:
            c2(v.col_p) += coeff;
            c2(v.col_q) -= coeff;
            break;
        }
    }
    if (prob.has_objective())
    {
        st = sx.run(c2, ncols + n_slack);
        if (st != LpStatus::optimal)
        {
            sol.status = st;
            return sol;
        }
    }

    // recover original variables
    Vec xs = Vec::Zero(n_total);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        xs(sx.basis[static_cast<size_t>(i)]) = sx.b(i);
    }
    sol.x = Vec::Zero(nvars);
    for (int j = 0; j < nvars; ++j)
    {
        const VarMap& v = vmap[static_cast<size_t>(j)];
        switch (v.kind)
        {
        case VarMap::shifted_lo:
            sol.x(j) = v.shift + xs(v.col_p);
            break;
        case VarMap::negated_hi:
            sol.x(j) = v.shift - xs(v.col_p);
            break;
        case VarMap::split:
            sol.x(j) = xs(v.col_p) - xs(v.col_q);
            break;
        }
    }
    sol.objective = prob.objective_constant();
    for (const auto& [idx, coeff] : prob.objective())
    {
        sol.objective += coeff * sol.x(idx);
    }

    // residuals against the original constraints
    double res = 0;
    auto eval_row = [&](const LpProblem::Row& row) {
        double v = -row.rhs;
        for (const auto& [idx, coeff] : row.terms)
        {
            v += coeff * sol.x(idx);
        }
        return v;
    };
    for (const auto& row : prob.equalities())
    {
        res = std::max(res, std::abs(eval_row(row)));
    }
    for (const auto& row : prob.inequalities())
    {
        res = std::max(res, eval_row(row));
    }
    for (int j = 0; j < nvars; ++j)
    {
        res = std::max(res, lo[static_cast<size_t>(j)] - sol.x(j));
        res = std::max(res, sol.x(j) - hi[static_cast<size_t>(j)]);
    }
    sol.max_residual = res;
    sol.status = res <= 1e-6 ? LpStatus::optimal : LpStatus::numerical_failure;
    return sol;
}

void add_abs_row_bound(LpProblem& prob, const std::vector<std::vector<LinExpr>>& rows,
                       const std::vector<LinExpr>& rhs)
{
    if (rows.size() != rhs.size())
    {
        throw std::invalid_argument("add_abs_row_bound: row/rhs count mismatch");
    }
    int total = 0;
    for (const auto& row : rows)
    {
        total += static_cast<int>(row.size());
    }
    const std::string name = "_abs" + std::to_string(prob.blocks().size());
    const VarBlock U = prob.add_block(name, total, 1, 0.0, kInf);
    int k = 0;
    for (size_t i = 0; i < rows.size(); ++i)
    {
        LinExpr row_sum;
        for (const auto& e : rows[i])
        {
            const LinExpr u = LinExpr::var(U(k++));
            prob.add_ineq(e - u, 0.0);
            prob.add_ineq(LinExpr(0.0) - e - u, 0.0);
            row_sum += u;
        }
        prob.add_ineq(row_sum - rhs[i], 0.0);
    }
}

void write_lp_format(const LpProblem& prob, std::ostream& os)
{
    auto var_name = [&](int idx) {
        for (const auto& b : prob.blocks())
        {
            if (idx >= b.offset && idx < b.offset + b.size())
            {
                const int local = idx - b.offset;
                return b.name + "_" + std::to_string(local / b.cols) + "_" +
                       std::to_string(local % b.cols);
            }
        }
        return std::string("x") + std::to_string(idx);
    };
    auto write_terms = [&](const std::vector<std::pair<int, double>>& terms) {
        bool first = true;
        for (const auto& [idx, coeff] : terms)
        {
            if (coeff >= 0 && !first)
            {
                os << " + " << coeff;
            }
            else
            {
                os << " - " << std::abs(coeff);
            }
            os << " " << var_name(idx);
            first = false;
        }
        if (first)
        {
            os << " 0 " << var_name(0);
        }
    };
    os << "Minimize\n obj:";
    write_terms(prob.objective());
    os << "\nSubject To\n";
    int cnt = 0;
    for (const auto& row : prob.equalities())
    {
        os << " e" << cnt++ << ":";
        write_terms(row.terms);
        os << " = " << row.rhs << "\n";
    }
    for (const auto& row : prob.inequalities())
    {
        os << " i" << cnt++ << ":";
        write_terms(row.terms);
        os << " <= " << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < prob.num_vars(); ++j)
    {
        const double l = prob.lower()[static_cast<size_t>(j)];
        const double h = prob.upper()[static_cast<size_t>(j)];
        if (l == -kInf && h == kInf)
        {
            os << " " << var_name(j) << " free\n";
        }
        else
        {
            os << " ";
            if (l == -kInf)
            {
                os << "-inf";
            }
            else
            {
                os << l;
            }
            os << " <= " << var_name(j) << " <= ";
            if (h == kInf)
            {
                os << "+inf";
            }
            else
            {
                os << h;
            }
            os << "\n";
        }
    }
    os << "End\n";
}

}  // namespace safeloop
