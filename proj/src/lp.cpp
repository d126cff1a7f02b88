#include "windh2/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>

namespace windh2::lp {

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
    }
    return "?";
}

double AffineExpr::evaluate(const std::vector<double>& x) const {
    double v = constant;
    for (const auto& [idx, coeff] : terms) v += coeff * x[static_cast<size_t>(idx)];
    return v;
}

int LpModel::addVariable(double lo, double up, std::string name) {
    lower_.push_back(lo);
    upper_.push_back(up);
    names_.push_back(std::move(name));
    return static_cast<int>(lower_.size()) - 1;
}

void LpModel::addConstraint(std::vector<Term> terms, Sense sense, double rhs) {
    rows_.push_back(Row{std::move(terms), sense, rhs});
}

void LpModel::addObjectiveTerm(int var, double coeff) {
    objective_.emplace_back(var, coeff);
}

void LpModel::validate() const {
    const int n = numVariables();
    for (int j = 0; j < n; ++j) {
        const double lo = lower_[j], up = upper_[j];
        if (std::isnan(lo) || std::isnan(up))
            throw ValidationError("lp: NaN bound on variable " + std::to_string(j));
        if (lo == kInf || up == -kInf || lo > up)
            throw ValidationError("lp: inverted or malformed bounds on variable " +
                                  std::to_string(j));
    }
    auto checkTerms = [n](const std::vector<Term>& terms, const char* where) {
        for (const auto& [idx, coeff] : terms) {
            if (idx < 0 || idx >= n)
                throw ValidationError(std::string("lp: ") + where +
                                      " references undeclared variable " + std::to_string(idx));
            if (!std::isfinite(coeff))
                throw ValidationError(std::string("lp: non-finite coefficient in ") + where);
        }
    };
    for (size_t r = 0; r < rows_.size(); ++r) {
        checkTerms(rows_[r].terms, "constraint");
        if (!std::isfinite(rows_[r].rhs))
            throw ValidationError("lp: non-finite rhs in constraint " + std::to_string(r));
    }
    checkTerms(objective_, "objective");
    if (!std::isfinite(objective_constant_))
        throw ValidationError("lp: non-finite objective constant");
}

void LpModel::writeLpFormat(std::ostream& os) const {
    auto varName = [this](int j) {
        return names_[j].empty() ? "x" + std::to_string(j) : names_[j];
    };
    os << "Minimize\n obj:";
    bool first = true;
    for (const auto& [idx, c] : objective_) {
        os << (first ? " " : (c < 0 ? " " : " + "));
        if (c < 0) os << "- ";
        os << std::abs(c) << " " << varName(idx);
        first = false;
    }
    if (first) os << " 0";
    os << "\nSubject To\n";
    for (size_t r = 0; r < rows_.size(); ++r) {
        os << " c" << r << ":";
        bool f2 = true;
        for (const auto& [idx, c] : rows_[r].terms) {
            os << (f2 ? " " : (c < 0 ? " " : " + "));
            if (c < 0) os << "- ";
            os << std::abs(c) << " " << varName(idx);
            f2 = false;
        }
        if (f2) os << " 0";
        switch (rows_[r].sense) {
            case Sense::LessEq: os << " <= "; break;
            case Sense::Equal: os << " = "; break;
            case Sense::GreaterEq: os << " >= "; break;
        }
        os << rows_[r].rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < numVariables(); ++j) {
        const double lo = lower_[j], up = upper_[j];
        if (lo == -kInf && up == kInf) {
            os << " " << varName(j) << " free\n";
        } else if (up == kInf) {
            os << " " << varName(j) << " >= " << lo << "\n";
        } else if (lo == -kInf) {
            os << " " << varName(j) << " <= " << up << "\n";
        } else {
            os << " " << lo << " <= " << varName(j) << " <= " << up << "\n";
        }
    }
    os << "End\n";
}

namespace {

// mapping from an original variable to its nonnegative counterparts
struct VarMap {
    enum Kind { Fixed, Shifted, Mirrored, Free } kind;
    int y1 = -1;  // shifted/mirrored/free positive part
    int y2 = -1;  // free negative part
    double offset = 0.0;
};

class Tableau {
public:
    // rows x (cols + 1); last column is the rhs
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * (cols + 1), 0.0) {}

    double& at(int r, int c) { return data_[size_t(r) * (cols_ + 1) + c]; }
    double at(int r, int c) const { return data_[size_t(r) * (cols_ + 1) + c]; }
    double& rhs(int r) { return data_[size_t(r) * (cols_ + 1) + cols_]; }
    double rhs(int r) const { return data_[size_t(r) * (cols_ + 1) + cols_]; }
    double* row(int r) { return data_.data() + size_t(r) * (cols_ + 1); }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int width() const { return cols_ + 1; }

private:
    int rows_, cols_;
    std::vector<double> data_;
};

struct CostRow {
    std::vector<double> red;  // reduced costs per column
    double value = 0.0;       // current objective of the basic solution

    explicit CostRow(int cols) : red(cols, 0.0) {}
};

void eliminate(double* target, const double* pivotRow, double factor, int width) {
    if (factor == 0.0) return;
    for (int j = 0; j < width; ++j) target[j] -= factor * pivotRow[j];
}

}  // namespace

LpSolution SimplexSolver::solve(const LpModel& model) const {
    model.validate();

    const int n = model.numVariables();
    const double feasTol = cfg_.feasTol;
    const double pivTol = cfg_.pivotTol;

    // Variable transformation to y >= 0.
    std::vector<VarMap> vmap(n);
    int ny = 0;
    std::vector<std::pair<int, double>> boundRows;  // (y index, width) for finite-width vars
    for (int j = 0; j < n; ++j) {
        const double lo = model.lower(j), up = model.upper(j);
        if (lo == up) {
            vmap[j] = {VarMap::Fixed, -1, -1, lo};
        } else if (lo != -kInf) {
            vmap[j] = {VarMap::Shifted, ny++, -1, lo};
            if (up != kInf) boundRows.emplace_back(vmap[j].y1, up - lo);
        } else if (up != kInf) {
            vmap[j] = {VarMap::Mirrored, ny++, -1, up};
        } else {
            vmap[j] = {VarMap::Free, ny, ny + 1, 0.0};
            ny += 2;
        }
    }

    // Accumulate a model row into dense y-space coefficients.
    auto densify = [&](const std::vector<Term>& terms, std::vector<double>& coeffs,
                       double& constant) {
        std::fill(coeffs.begin(), coeffs.end(), 0.0);
        constant = 0.0;
        for (const auto& [idx, c] : terms) {
            const VarMap& vm = vmap[idx];
            switch (vm.kind) {
                case VarMap::Fixed: constant += c * vm.offset; break;
                case VarMap::Shifted:
                    coeffs[vm.y1] += c;
                    constant += c * vm.offset;
                    break;
                case VarMap::Mirrored:
                    coeffs[vm.y1] -= c;
                    constant += c * vm.offset;
                    break;
                case VarMap::Free:
                    coeffs[vm.y1] += c;
                    coeffs[vm.y2] -= c;
                    break;
            }
        }
    };

    // Objective in y-space.
    std::vector<double> objY(ny, 0.0);
    double objConst = model.objectiveConstant();
    {
        std::vector<double> tmp(ny, 0.0);
        double cst = 0.0;
        densify(model.objective(), tmp, cst);
        objY = tmp;
        objConst += cst;
    }

    // Collect canonical rows: coeffs in y-space, sense, rhs.
    struct CanonRow {
        std::vector<double> a;
        Sense sense;
        double b;
    };
    std::vector<CanonRow> canon;
    canon.reserve(model.rows().size() + boundRows.size());
    {
        std::vector<double> tmp(ny, 0.0);
        double cst = 0.0;
        for (const auto& row : model.rows()) {
            densify(row.terms, tmp, cst);
            canon.push_back(CanonRow{tmp, row.sense, row.rhs - cst});
        }
        for (const auto& [yi, w] : boundRows) {
            std::fill(tmp.begin(), tmp.end(), 0.0);
            tmp[yi] = 1.0;
            canon.push_back(CanonRow{tmp, Sense::LessEq, w});
        }
    }
    const int m = static_cast<int>(canon.size());

    // Degenerate case: no free structure left. Evaluate rows directly.
    if (ny == 0) {
        for (int i = 0; i < m; ++i) {
            const double lhs = 0.0, b = canon[i].b;
            const bool ok = (canon[i].sense == Sense::LessEq && lhs <= b + feasTol) ||
                            (canon[i].sense == Sense::Equal && std::abs(lhs - b) <= feasTol) ||
                            (canon[i].sense == Sense::GreaterEq && lhs >= b - feasTol);
            if (!ok) return LpSolution{Status::Infeasible, 0.0, {}};
        }
        std::vector<double> primal(n, 0.0);
        for (int j = 0; j < n; ++j) primal[j] = vmap[j].offset;
        double obj = model.objectiveConstant();
        for (const auto& [idx, c] : model.objective()) obj += c * primal[idx];
        return LpSolution{Status::Optimal, obj, std::move(primal)};
    }

    // Slack/surplus columns, one per inequality row; artificial columns as needed.
    int nSlack = 0;
    for (const auto& r : canon)
        if (r.sense != Sense::Equal) ++nSlack;

    // First pass: decide row signs and which rows need artificials.
    // After negation every rhs is >= 0.
    std::vector<int> slackCol(m, -1);
    std::vector<bool> needArtificial(m, false);
    {
        int sc = ny;
        for (int i = 0; i < m; ++i) {
            CanonRow& r = canon[i];
            double slackSign = 0.0;
            if (r.sense == Sense::LessEq) slackSign = 1.0;
            else if (r.sense == Sense::GreaterEq) slackSign = -1.0;
            if (slackSign != 0.0) slackCol[i] = sc++;
            const bool negate = r.b < 0.0;
            if (negate) {
                for (double& a : r.a) a = -a;
                r.b = -r.b;
                slackSign = -slackSign;
            }
            // a +1 slack can seed the basis; anything else needs an artificial
            if (slackSign != 1.0) needArtificial[i] = true;
            r.sense = (slackSign == 1.0)   ? Sense::LessEq
                      : (slackSign == -1.0) ? Sense::GreaterEq
                                            : Sense::Equal;
        }
    }

    // Crash pass: a structural column whose only nonzero is a +1 in a needy
    // row can seed the basis there instead of an artificial (typical for
    // per-scenario epigraph variables).
    std::vector<int> crashCol(m, -1);
    {
        std::vector<int> nnz(ny, 0);
        std::vector<int> nzRow(ny, -1);
        std::vector<double> nzVal(ny, 0.0);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < ny; ++j) {
                if (canon[i].a[j] != 0.0) {
                    ++nnz[j];
                    nzRow[j] = i;
                    nzVal[j] = canon[i].a[j];
                }
            }
        }
        for (int j = 0; j < ny; ++j) {
            if (nnz[j] != 1 || std::abs(nzVal[j] - 1.0) > 1e-12) continue;
            const int i = nzRow[j];
            if (needArtificial[i] && crashCol[i] < 0) {
                crashCol[i] = j;
                needArtificial[i] = false;
            }
        }
    }
    int nArt = 0;
    for (int i = 0; i < m; ++i)
        if (needArtificial[i]) ++nArt;

    const int nCols = ny + nSlack + nArt;
    const int artBase = ny + nSlack;
    Tableau T(m, nCols);
    std::vector<int> basis(m, -1);
    {
        int art = artBase;
        for (int i = 0; i < m; ++i) {
            const CanonRow& r = canon[i];
            for (int j = 0; j < ny; ++j) T.at(i, j) = r.a[j];
            if (slackCol[i] >= 0)
                T.at(i, slackCol[i]) = (r.sense == Sense::LessEq) ? 1.0 : -1.0;
            T.rhs(i) = r.b;
            if (needArtificial[i]) {
                T.at(i, art) = 1.0;
                basis[i] = art++;
            } else if (crashCol[i] >= 0) {
                basis[i] = crashCol[i];
            } else {
                basis[i] = slackCol[i];
            }
        }
    }

    // Reduced-cost rows. Crash-basis columns may carry objective cost, so
    // initialize phase2 by the general formula c_j - c_B B^-1 A_j; the
    // starting tableau is already canonical w.r.t. the chosen basis.
    CostRow phase2(nCols);
    for (int j = 0; j < ny; ++j) phase2.red[j] = objY[j];
    for (int i = 0; i < m; ++i) {
        const int b = basis[i];
        if (b < ny && objY[b] != 0.0) {
            const double cb = objY[b];
            const double* row = T.row(i);
            for (int j = 0; j < nCols; ++j) phase2.red[j] -= cb * row[j];
            phase2.red[b] = 0.0;
            phase2.value += cb * T.rhs(i);
        }
    }

    CostRow phase1(nCols);
    if (nArt > 0) {
        for (int i = 0; i < m; ++i) {
            if (!needArtificial[i]) continue;
            const double* row = T.row(i);
            for (int j = 0; j < nCols; ++j) phase1.red[j] -= row[j];
            phase1.value += T.rhs(i);
        }
        for (int a = artBase; a < nCols; ++a) phase1.red[a] += 1.0;  // own cost
    }

    const int width = T.width();
    long maxIter = cfg_.maxIterations > 0
                       ? cfg_.maxIterations
                       : 200L * (m + nCols) + 20000L;

    auto doPivot = [&](int pr, int pc, CostRow& active, CostRow* other) {
        double* prow = T.row(pr);
        const double pivot = prow[pc];
        const double inv = 1.0 / pivot;
        for (int j = 0; j < width; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == pr) continue;
            double* trow = T.row(i);
            const double f = trow[pc];
            if (f != 0.0) {
                eliminate(trow, prow, f, width);
                trow[pc] = 0.0;
                if (trow[width - 1] < 0.0 && trow[width - 1] > -1e-11) trow[width - 1] = 0.0;
            }
        }
        // z' = z + reduced_cost(entering) * step; step is the normalized rhs
        const double newRhs = prow[width - 1];
        {
            const double f = active.red[pc];
            if (f != 0.0) {
                for (int j = 0; j < nCols; ++j) active.red[j] -= f * prow[j];
                active.red[pc] = 0.0;
                active.value += f * newRhs;
            }
        }
        if (other) {
            const double f = other->red[pc];
            if (f != 0.0) {
                for (int j = 0; j < nCols; ++j) other->red[j] -= f * prow[j];
                other->red[pc] = 0.0;
                other->value += f * newRhs;
            }
        }
        basis[pr] = pc;
    };

    // Runs the simplex loop on the active cost row. Columns with index >=
    // colLimit never enter. Returns false on unbounded.
    auto iterate = [&](CostRow& active, CostRow* other, int colLimit, long& iterBudget) -> bool {
        bool bland = false;
        int stall = 0;
        const int stallLimit = 2 * (m + colLimit) + 64;
        while (true) {
            if (--iterBudget < 0)
                throw SolverError("lp: simplex iteration cap exceeded");
            // entering column
            int pc = -1;
            if (!bland) {
                double best = -pivTol;
                for (int j = 0; j < colLimit; ++j) {
                    const double rc = active.red[j];
                    if (rc < best) {
                        best = rc;
                        pc = j;
                    }
                }
            } else {
                for (int j = 0; j < colLimit; ++j) {
                    if (active.red[j] < -pivTol) {
                        pc = j;
                        break;
                    }
                }
            }
            if (pc < 0) return true;  // optimal for this phase

            // ratio test
            int pr = -1;
            double bestRatio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = T.at(i, pc);
                if (a > pivTol) {
                    const double b = std::max(T.rhs(i), 0.0);
                    const double ratio = b / a;
                    if (pr < 0 || ratio < bestRatio - 1e-12 ||
                        (ratio <= bestRatio + 1e-12 && basis[i] < basis[pr])) {
                        pr = i;
                        bestRatio = ratio;
                    }
                }
            }
            if (pr < 0) return false;  // unbounded direction

            const double before = active.value;
            doPivot(pr, pc, active, other);
            if (active.value < before - 1e-11) {
                stall = 0;
                bland = false;
            } else if (++stall > stallLimit) {
                bland = true;  // anti-cycling
            }
        }
    };

    long iterBudget = maxIter;

    if (nArt > 0) {
        // Artificial columns never re-enter once out, so entering candidates
        // are restricted to structural/slack columns in both phases.
        if (!iterate(phase1, &phase2, artBase, iterBudget))
            throw SolverError("lp: phase-1 reported unbounded");
        if (phase1.value > feasTol) return LpSolution{Status::Infeasible, 0.0, {}};
        // Drive leftover artificials out of the basis where possible. A tiny
        // pivot element would amplify the near-zero rhs, so require a stronger
        // threshold and otherwise leave the (redundant) row alone.
        const double driveTol = std::max(pivTol, 1e-7);
        for (int i = 0; i < m; ++i) {
            if (basis[i] < artBase) continue;
            int pc = -1;
            double best = driveTol;
            for (int j = 0; j < artBase; ++j) {
                const double a = std::abs(T.at(i, j));
                if (a > best) {
                    best = a;
                    pc = j;
                }
            }
            if (pc >= 0) doPivot(i, pc, phase1, &phase2);
        }
    }

    if (!iterate(phase2, nullptr, artBase, iterBudget))
        return LpSolution{Status::Unbounded, 0.0, {}};

    // Extract y, then x.
    std::vector<double> y(ny, 0.0);
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= 0 && basis[i] < ny) y[basis[i]] = std::max(T.rhs(i), 0.0);
    }
    std::vector<double> primal(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = vmap[j];
        switch (vm.kind) {
            case VarMap::Fixed: primal[j] = vm.offset; break;
            case VarMap::Shifted: primal[j] = vm.offset + y[vm.y1]; break;
            case VarMap::Mirrored: primal[j] = vm.offset - y[vm.y1]; break;
            case VarMap::Free: primal[j] = y[vm.y1] - y[vm.y2]; break;
        }
    }
    double obj = model.objectiveConstant();
    for (const auto& [idx, c] : model.objective()) obj += c * primal[idx];
    return LpSolution{Status::Optimal, obj, std::move(primal)};
}

LpSolution solve(const LpModel& model) {
    static const SimplexSolver solver;
    return solver.solve(model);
}

}  // namespace windh2::lp
