#include "mcao/lpcore.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace mcao {

int LpModel::add_var(double obj, double lower, double upper, std::string name) {
    c.push_back(obj);
    lo.push_back(lower);
    hi.push_back(upper);
    if (name.empty()) name = "x" + std::to_string(c.size() - 1);
    var_names.push_back(std::move(name));
    return int(c.size()) - 1;
}

int LpModel::add_row(std::string name, std::vector<std::pair<int, double>> coefs, double rhs) {
    int id = int(rows.size());
    if (name.empty()) name = "r" + std::to_string(id);
    index_[name] = id;
    rows.push_back({std::move(name), std::move(coefs), rhs});
    return id;
}

int LpModel::row_id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown LP row " + name);
    return it->second;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivTol = 1e-9;
constexpr double kPrimalTol = 1e-9;
constexpr double kPriceTol = 1e-9;

// Bounded primal revised simplex with an explicit basis inverse. Columns are
// structurals, then one slack per row, then phase-one artificials.
class Simplex {
public:
    Simplex(const LpModel& md, const LpOptions& opt) : md_(md), opt_(opt) {
        m_ = md.num_rows();
        nstruct_ = md.num_vars();
        cols_.resize(nstruct_);
        for (int r = 0; r < m_; ++r)
            for (auto [k, v] : md.rows[r].coefs)
                if (v != 0.0) cols_[k].push_back({r, v});
        for (int r = 0; r < m_; ++r) cols_.push_back({{r, 1.0}});
        lo_ = md.lo;
        hi_ = md.hi;
        lo_.resize(nstruct_ + m_, 0.0);
        hi_.resize(nstruct_ + m_, kInf);
        b_.resize(m_);
        for (int r = 0; r < m_; ++r) b_[r] = md.rows[r].rhs;
    }

    LpSolution run() {
        const int nslack_end = nstruct_ + m_;
        x_.assign(nslack_end, 0.0);
        for (int k = 0; k < nstruct_; ++k) x_[k] = lo_[k];
        // Residual with all structurals at their lower bounds.
        std::vector<double> res = b_;
        for (int k = 0; k < nstruct_; ++k)
            for (auto [r, v] : cols_[k]) res[r] -= v * x_[k];
        basis_.assign(m_, -1);
        for (int r = 0; r < m_; ++r) {
            if (res[r] >= 0.0) {
                basis_[r] = nstruct_ + r;
                x_[nstruct_ + r] = res[r];
            } else {
                int a = int(cols_.size());
                cols_.push_back({{r, -1.0}});
                lo_.push_back(0.0);
                hi_.push_back(kInf);
                x_.push_back(-res[r]);
                basis_[r] = a;
            }
        }
        ncols_ = int(cols_.size());
        in_basis_.assign(ncols_, -1);
        for (int r = 0; r < m_; ++r) in_basis_[basis_[r]] = r;
        refactor();

        LpSolution sol;
        if (ncols_ > nslack_end) {
            std::vector<double> c1(ncols_, 0.0);
            for (int k = nslack_end; k < ncols_; ++k) c1[k] = -1.0;
            LpStatus st = iterate(c1, sol.iterations);
            double infeas = 0.0;
            for (int k = nslack_end; k < ncols_; ++k) infeas += x_[k];
            if (st != LpStatus::Optimal || infeas > opt_.tol_feas) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }
            for (int k = nslack_end; k < ncols_; ++k) {
                hi_[k] = 0.0;
                x_[k] = 0.0;
            }
            recompute_basic_values();
        }
        std::vector<double> c2(ncols_, 0.0);
        for (int k = 0; k < nstruct_; ++k) c2[k] = md_.c[k];
        LpStatus st = iterate(c2, sol.iterations);
        sol.status = st;
        if (st != LpStatus::Optimal) return sol;

        sol.x.assign(x_.begin(), x_.begin() + nstruct_);
        for (int k = 0; k < nstruct_; ++k) sol.x[k] = std::clamp(sol.x[k], lo_[k], hi_[k]);
        std::vector<double> y = duals(c2);
        sol.y.resize(m_);
        for (int r = 0; r < m_; ++r) sol.y[r] = y[r] < 0.0 && y[r] > -opt_.tol_dual ? 0.0 : y[r];
        sol.d.resize(nstruct_);
        for (int k = 0; k < nstruct_; ++k) {
            double d = md_.c[k];
            for (auto [r, v] : cols_[k]) d -= sol.y[r] * v;
            sol.d[k] = d;
        }
        sol.objective = 0.0;
        for (int k = 0; k < nstruct_; ++k) sol.objective += md_.c[k] * sol.x[k];
        return sol;
    }

private:
    void refactor() {
        // Gauss-Jordan with partial pivoting on the basis matrix.
        std::vector<double> a(std::size_t(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r)
            for (auto [i, v] : cols_[basis_[r]]) a[std::size_t(i) * m_ + r] = v;
        binv_.assign(std::size_t(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) binv_[std::size_t(r) * m_ + r] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            double best = std::abs(a[std::size_t(col) * m_ + col]);
            for (int r = col + 1; r < m_; ++r) {
                double v = std::abs(a[std::size_t(r) * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-12) throw LpNumericalError("simplex: singular basis during refactorization");
            if (piv != col) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(a[std::size_t(piv) * m_ + k], a[std::size_t(col) * m_ + k]);
                    std::swap(binv_[std::size_t(piv) * m_ + k], binv_[std::size_t(col) * m_ + k]);
                }
            }
            double inv = 1.0 / a[std::size_t(col) * m_ + col];
            for (int k = 0; k < m_; ++k) {
                a[std::size_t(col) * m_ + k] *= inv;
                binv_[std::size_t(col) * m_ + k] *= inv;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = a[std::size_t(r) * m_ + col];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    a[std::size_t(r) * m_ + k] -= f * a[std::size_t(col) * m_ + k];
                    binv_[std::size_t(r) * m_ + k] -= f * binv_[std::size_t(col) * m_ + k];
                }
            }
        }
        since_refactor_ = 0;
        recompute_basic_values();
    }

    void recompute_basic_values() {
        std::vector<double> rhs = b_;
        for (int k = 0; k < ncols_; ++k) {
            if (in_basis_[k] >= 0 || x_[k] == 0.0) continue;
            for (auto [r, v] : cols_[k]) rhs[r] -= v * x_[k];
        }
        for (int r = 0; r < m_; ++r) {
            double s = 0.0;
            const double* row = &binv_[std::size_t(r) * m_];
            for (int i = 0; i < m_; ++i) s += row[i] * rhs[i];
            x_[basis_[r]] = s;
        }
    }

    std::vector<double> duals(const std::vector<double>& c) const {
        std::vector<double> y(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double cb = c[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &binv_[std::size_t(r) * m_];
            for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
        }
        return y;
    }

    LpStatus iterate(const std::vector<double>& c, int& iters) {
        int degenerate = 0;
        bool bland = false;
        std::vector<double> alpha(m_);
        while (true) {
            if (iters >= opt_.max_iterations) throw LpNumericalError("simplex: iteration limit reached");
            std::vector<double> y = duals(c);
            // Pricing: Dantzig with lowest-index ties, Bland after stalling.
            int q = -1;
            double best = 0.0;
            int dir = 0;
            for (int k = 0; k < ncols_; ++k) {
                if (in_basis_[k] >= 0) continue;
                if (hi_[k] - lo_[k] <= 0.0) continue;
                double d = c[k];
                for (auto [r, v] : cols_[k]) d -= y[r] * v;
                bool at_lo = x_[k] <= lo_[k];
                int s = 0;
                if (at_lo && d > kPriceTol) s = 1;
                if (!at_lo && d < -kPriceTol) s = -1;
                if (s == 0) continue;
                if (bland) {
                    q = k;
                    dir = s;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = k;
                    dir = s;
                }
            }
            if (q < 0) return LpStatus::Optimal;

            std::fill(alpha.begin(), alpha.end(), 0.0);
            for (auto [i, v] : cols_[q])
                for (int r = 0; r < m_; ++r) alpha[r] += binv_[std::size_t(r) * m_ + i] * v;

            // Ratio test including the entering variable's own bound flip.
            double theta = hi_[q] - lo_[q];
            int leave = -1;
            double leave_piv = 0.0;
            bool leave_to_hi = false;
            for (int r = 0; r < m_; ++r) {
                double a = dir * alpha[r];
                int bv = basis_[r];
                double t;
                bool to_hi;
                if (a > kPivTol) {
                    t = (x_[bv] - lo_[bv]) / a;
                    to_hi = false;
                } else if (a < -kPivTol && hi_[bv] < kInf) {
                    t = (hi_[bv] - x_[bv]) / -a;
                    to_hi = true;
                } else {
                    continue;
                }
                t = std::max(t, 0.0);
                bool take = false;
                if (t < theta - 1e-12) {
                    take = true;
                } else if (t <= theta + 1e-12 && leave >= 0) {
                    if (bland)
                        take = bv < basis_[leave];
                    else
                        take = std::abs(a) > leave_piv;
                }
                if (take) {
                    theta = std::min(t, theta);
                    leave = r;
                    leave_piv = std::abs(a);
                    leave_to_hi = to_hi;
                }
            }
            if (theta == kInf) return LpStatus::Unbounded;
            ++iters;
            if (theta <= kPrimalTol) {
                if (++degenerate > opt_.degenerate_before_bland) bland = true;
            } else {
                degenerate = 0;
            }

            for (int r = 0; r < m_; ++r) x_[basis_[r]] -= dir * theta * alpha[r];
            x_[q] += dir * theta;
            if (leave < 0) {
                // Bound flip: the entering variable moves to its other bound.
                x_[q] = dir > 0 ? hi_[q] : lo_[q];
                continue;
            }
            int out = basis_[leave];
            x_[out] = leave_to_hi ? hi_[out] : lo_[out];
            pivot(leave, q, alpha);
            if (++since_refactor_ >= opt_.refactor_every) refactor();
        }
    }

    void pivot(int r, int q, const std::vector<double>& alpha) {
        double* pr = &binv_[std::size_t(r) * m_];
        double inv = 1.0 / alpha[r];
        for (int i = 0; i < m_; ++i) pr[i] *= inv;
        for (int s = 0; s < m_; ++s) {
            if (s == r || alpha[s] == 0.0) continue;
            double f = alpha[s];
            double* ps = &binv_[std::size_t(s) * m_];
            for (int i = 0; i < m_; ++i) ps[i] -= f * pr[i];
        }
        in_basis_[basis_[r]] = -1;
        basis_[r] = q;
        in_basis_[q] = r;
    }

    const LpModel& md_;
    LpOptions opt_;
    int m_ = 0, nstruct_ = 0, ncols_ = 0, since_refactor_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, hi_, b_, x_, binv_;
    std::vector<int> basis_, in_basis_;
};

void check_model(const LpModel& md) {
    const int n = md.num_vars();
    if (int(md.lo.size()) != n || int(md.hi.size()) != n) throw std::invalid_argument("LP: bound vectors mis-sized");
    for (int k = 0; k < n; ++k) {
        if (!std::isfinite(md.c[k])) throw std::invalid_argument("LP: non-finite objective coefficient");
        if (!(md.lo[k] >= 0.0) || !std::isfinite(md.hi[k]) || md.hi[k] < md.lo[k])
            throw std::invalid_argument("LP: variable " + md.var_names[k] + " needs 0 <= lo <= hi < inf");
    }
    for (const auto& row : md.rows) {
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("LP: non-finite right-hand side");
        for (auto [k, v] : row.coefs) {
            if (k < 0 || k >= n) throw std::invalid_argument("LP: row " + row.name + " refers to a missing variable");
            if (!std::isfinite(v)) throw std::invalid_argument("LP: non-finite coefficient in row " + row.name);
        }
    }
}

}  // namespace

double primal_violation(const LpModel& md, const std::vector<double>& x) {
    double worst = 0.0;
    for (int k = 0; k < md.num_vars(); ++k) {
        worst = std::max(worst, md.lo[k] - x[k]);
        worst = std::max(worst, x[k] - md.hi[k]);
    }
    for (const auto& row : md.rows) {
        double s = 0.0;
        for (auto [k, v] : row.coefs) s += v * x[k];
        worst = std::max(worst, s - row.rhs);
    }
    return worst;
}

double dual_objective(const LpModel& md, const LpSolution& sol) {
    double v = 0.0;
    for (int r = 0; r < md.num_rows(); ++r) v += md.rows[r].rhs * sol.y[r];
    for (int k = 0; k < md.num_vars(); ++k) v += sol.d[k] > 0.0 ? md.hi[k] * sol.d[k] : md.lo[k] * sol.d[k];
    return v;
}

LpSolution solve(const LpModel& md, const LpOptions& opt) {
    check_model(md);
    LpSolution sol;
    // A failed certificate triggers a fresh solve with a tighter refactor cadence.
    LpOptions o = opt;
    for (int attempt = 0; attempt < 3; ++attempt) {
        Simplex sx(md, o);
        sol = sx.run();
        if (sol.status != LpStatus::Optimal) return sol;
        double scale = std::max(1.0, std::abs(sol.objective));
        bool primal_ok = primal_violation(md, sol.x) <= opt.tol_feas;
        bool dual_ok = std::all_of(sol.y.begin(), sol.y.end(), [&](double y) { return y >= -opt.tol_dual; });
        bool gap_ok = std::abs(sol.objective - dual_objective(md, sol)) <= opt.tol_dual * scale;
        if (primal_ok && dual_ok && gap_ok) return sol;
        o.refactor_every = std::max(1, o.refactor_every / 4);
    }
    throw LpNumericalError("simplex: optimality certificate failed after refinement");
}

double dual_of(const LpModel& md, const LpSolution& sol, const std::string& row) {
    if (sol.status != LpStatus::Optimal) throw std::logic_error("dual_of: solution is not optimal");
    return sol.y[md.row_id(row)];
}

std::string to_lp_format(const LpModel& md) {
    auto clean = [](std::string s) {
        for (char& ch : s)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) ch = '_';
        return s;
    };
    std::ostringstream os;
    os.precision(17);
    auto term = [&](double v, const std::string& name, bool first) {
        if (v < 0)
            os << (first ? "-" : " - ") << -v << ' ' << name;
        else
            os << (first ? "" : " + ") << v << ' ' << name;
    };
    os << "Maximize\n obj:";
    bool first = true;
    for (int k = 0; k < md.num_vars(); ++k) {
        if (md.c[k] == 0.0) continue;
        os << ' ';
        term(md.c[k], clean(md.var_names[k]), first);
        first = false;
    }
    if (first) os << " 0 " << clean(md.var_names.empty() ? "x0" : md.var_names[0]);
    os << "\nSubject To\n";
    for (const auto& row : md.rows) {
        os << ' ' << clean(row.name) << ':';
        bool f = true;
        for (auto [k, v] : row.coefs) {
            os << ' ';
            term(v, clean(md.var_names[k]), f);
            f = false;
        }
        if (f) os << " 0 " << clean(md.var_names.empty() ? "x0" : md.var_names[0]);
        os << " <= " << row.rhs << '\n';
    }
    os << "Bounds\n";
    for (int k = 0; k < md.num_vars(); ++k) os << ' ' << md.lo[k] << " <= " << clean(md.var_names[k]) << " <= " << md.hi[k] << '\n';
    os << "End\n";
    return os.str();
}

}  // namespace mcao
