#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "windh2/errors.hpp"

namespace windh2::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status s);

/// A linear term referencing a declared variable by index.
using Term = std::pair<int, double>;

/// Affine expression over model variables: sum of terms plus a constant.
/// Used to carry cost/loss expressions between model builders.
struct AffineExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    void add(int var, double coeff) { terms.emplace_back(var, coeff); }
    double evaluate(const std::vector<double>& x) const;
};

/// Minimization LP over continuous variables with bounds.
///
/// Variables are referenced by the index returned from addVariable.
/// The objective is assembled additively; duplicate indices accumulate.
class LpModel {
public:
    int addVariable(double lower, double upper, std::string name = {});
    void addConstraint(std::vector<Term> terms, Sense sense, double rhs);
    void addObjectiveTerm(int var, double coeff);
    void addObjectiveConstant(double c) { objective_constant_ += c; }

    int numVariables() const { return static_cast<int>(lower_.size()); }
    int numConstraints() const { return static_cast<int>(rows_.size()); }

    double lower(int v) const { return lower_[v]; }
    double upper(int v) const { return upper_[v]; }
    const std::string& name(int v) const { return names_[v]; }
    double objectiveConstant() const { return objective_constant_; }

    /// Throws ValidationError on out-of-range indices, NaN coefficients,
    /// or inverted bounds. Called by the solver before any pivoting.
    void validate() const;

    /// Plain-text dump in LP interchange format for cross-checking against
    /// external solvers.
    void writeLpFormat(std::ostream& os) const;

    struct Row {
        std::vector<Term> terms;
        Sense sense;
        double rhs;
    };
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<Term>& objective() const { return objective_; }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::string> names_;
    std::vector<Row> rows_;
    std::vector<Term> objective_;
    double objective_constant_ = 0.0;
};

struct LpSolution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> primal;  // empty unless status == Optimal
};

struct SolverConfig {
    double feasTol = 1e-6;   // constraint satisfaction tolerance
    double pivotTol = 1e-9;  // reduced-cost / pivot element threshold
    int maxIterations = 0;   // 0: derived from problem size
};

/// Dense primal simplex (two-phase tableau). Dantzig pricing by default,
/// Bland's rule engaged after a stall to guarantee termination.
class SimplexSolver {
public:
    SimplexSolver() = default;
    explicit SimplexSolver(SolverConfig cfg) : cfg_(cfg) {}

    LpSolution solve(const LpModel& model) const;

    const SolverConfig& config() const { return cfg_; }

private:
    SolverConfig cfg_;
};

/// Convenience wrapper with default configuration.
LpSolution solve(const LpModel& model);

}  // namespace windh2::lp
