#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mcao {

// max c.x  s.t.  rows: sum_k a_k x_k <= rhs,  lo <= x <= hi  (0 <= lo, hi finite)
struct LpRow {
    std::string name;
    std::vector<std::pair<int, double>> coefs;
    double rhs = 0.0;
};

struct LpModel {
    std::vector<double> c, lo, hi;
    std::vector<std::string> var_names;
    std::vector<LpRow> rows;

    int num_vars() const { return int(c.size()); }
    int num_rows() const { return int(rows.size()); }
    int add_var(double obj, double lower, double upper, std::string name = {});
    int add_row(std::string name, std::vector<std::pair<int, double>> coefs, double rhs);
    // Index of a named row; throws std::out_of_range for unknown names.
    int row_id(const std::string& name) const;
    bool has_row(const std::string& name) const { return index_.count(name) != 0; }

private:
    std::unordered_map<std::string, int> index_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;  // structural values
    std::vector<double> y;  // row duals, >= 0
    std::vector<double> d;  // reduced costs c - yA
    double objective = 0.0;
    int iterations = 0;
};

struct LpOptions {
    double tol_feas = 1e-7;
    double tol_dual = 1e-7;
    int refactor_every = 64;
    int degenerate_before_bland = 50;
    int max_iterations = 1000000;
};

// Raised when the basis cannot be refactored or the final certificates do not
// verify after the allowed number of refinements.
struct LpNumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LpSolution solve(const LpModel& model, const LpOptions& opt = {});

double dual_of(const LpModel& model, const LpSolution& sol, const std::string& row);

// Objective of the dual: b.y plus the bound terms of the reduced costs.
double dual_objective(const LpModel& model, const LpSolution& sol);

// Largest violation of rows and bounds at x.
double primal_violation(const LpModel& model, const std::vector<double>& x);

// CPLEX LP text layout for cross-checking with external solvers.
std::string to_lp_format(const LpModel& model);

}  // namespace mcao
