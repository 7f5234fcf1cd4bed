#ifndef SAFELOOP_LP_HPP_
#define SAFELOOP_LP_HPP_

#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "safeloop/numerics.hpp"

namespace safeloop
{

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Affine expression over the variables of an LpProblem.
struct LinExpr
{
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}

    static LinExpr var(int index, double coeff = 1.0)
    {
        LinExpr e;
        e.terms.emplace_back(index, coeff);
        return e;
    }

    LinExpr& operator+=(const LinExpr& other);
    LinExpr& operator-=(const LinExpr& other);
    LinExpr& operator*=(double a);
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double a, LinExpr e);

/// A named rows x cols block of variables. operator() gives global indices.
struct VarBlock
{
    std::string name;
    int offset = 0;
    int rows = 0;
    int cols = 0;

    int operator()(int i, int j) const { return offset + i * cols + j; }
    int operator()(int i) const { return offset + i; }
    int size() const { return rows * cols; }
};

/// Dense matrix of affine expressions; supports the few products the
/// synthesis programs need.
class ExprMat
{
public:
    ExprMat() = default;
    ExprMat(Eigen::Index rows, Eigen::Index cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols))
    {
    }

    static ExprMat from_block(const VarBlock& b);
    static ExprMat constant(const Mat& M);

    LinExpr& at(Eigen::Index i, Eigen::Index j) { return data_[static_cast<size_t>(i * cols_ + j)]; }
    const LinExpr& at(Eigen::Index i, Eigen::Index j) const
    {
        return data_[static_cast<size_t>(i * cols_ + j)];
    }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }

    ExprMat col(Eigen::Index j) const;

    friend ExprMat operator*(const Mat& A, const ExprMat& X);
    friend ExprMat operator*(const ExprMat& X, const Mat& B);
    friend ExprMat operator+(const ExprMat& A, const ExprMat& B);
    friend ExprMat operator-(const ExprMat& A, const ExprMat& B);

private:
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::vector<LinExpr> data_;
};

enum class LpStatus
{
    optimal,
    infeasible,
    unbounded,
    numerical_failure
};

const char* to_string(LpStatus s);

/// Solver-agnostic linear program: named variable blocks, affine equality and
/// inequality constraints, per-variable box bounds, optional linear objective
/// (minimized; absent means pure feasibility).
class LpProblem
{
public:
    VarBlock add_block(const std::string& name, int rows, int cols, double lo = -kInf,
                       double hi = kInf);

    void set_bounds(int var, double lo, double hi);

    /// expr == rhs
    void add_eq(const LinExpr& expr, double rhs = 0.0);
    /// expr <= rhs
    void add_ineq(const LinExpr& expr, double rhs = 0.0);
    /// entrywise E == R
    void add_eq(const ExprMat& E, const Mat& R);

    void set_objective(const LinExpr& expr);

    int num_vars() const { return num_vars_; }
    const std::vector<VarBlock>& blocks() const { return blocks_; }

    struct Row
    {
        std::vector<std::pair<int, double>> terms;
        double rhs;
    };
    const std::vector<Row>& equalities() const { return eqs_; }
    const std::vector<Row>& inequalities() const { return ineqs_; }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return hi_; }
    const std::vector<std::pair<int, double>>& objective() const { return objective_; }
    bool has_objective() const { return has_objective_; }
    double objective_constant() const { return objective_constant_; }

private:
    int num_vars_ = 0;
    std::vector<VarBlock> blocks_;
    std::vector<double> lo_, hi_;
    std::vector<Row> eqs_, ineqs_;
    std::vector<std::pair<int, double>> objective_;
    double objective_constant_ = 0.0;
    bool has_objective_ = false;
};

struct LpSolution
{
    LpStatus status = LpStatus::numerical_failure;
    Vec x;                 ///< flat solution over all variables
    double objective = 0;  ///< includes the constant term
    double max_residual = 0;

    Mat block(const LpProblem& prob, const std::string& name) const;
};

/// Two-phase dense simplex. Never throws on solver trouble; trouble is a
/// numerical_failure status.
LpSolution solve(const LpProblem& prob, double tol = 1e-7);

/// For each k, enforce sum_j |rows[k][j]| + sum_j |extra[k][j]| <= rhs[k]
/// through nonnegative auxiliaries U with -U <= expr <= U. This is the one
/// audited encoding of absolute values in the project.
void add_abs_row_bound(LpProblem& prob, const std::vector<std::vector<LinExpr>>& rows,
                       const std::vector<LinExpr>& rhs);

/// Dump in CPLEX LP text format for external cross-checking.
void write_lp_format(const LpProblem& prob, std::ostream& os);

}  // namespace safeloop

#endif
