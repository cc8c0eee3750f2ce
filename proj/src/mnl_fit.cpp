#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mcao/simlab.hpp"

namespace mcao {

namespace {

std::vector<std::string> split(const std::string& s, char d) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, d)) out.push_back(cur);
    if (!s.empty() && s.back() == d) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<TransactionRecord> read_transactions(std::istream& in, char delim) {
    std::vector<TransactionRecord> out;
    std::string line;
    int lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split(line, delim);
        if (width == 0) {
            // Header: features..., offered, chosen.
            if (f.size() < 2) throw std::runtime_error("transactions: header needs offered and chosen columns");
            width = f.size();
            continue;
        }
        if (f.size() != width)
            throw std::runtime_error("transactions line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(width) + " fields");
        TransactionRecord r;
        for (std::size_t c = 0; c + 2 < width; ++c) r.features.push_back(trim(f[c]));
        std::istringstream os(f[width - 2]);
        int k;
        while (os >> k) r.offered.push_back(k);
        if (!os.eof()) throw std::runtime_error("transactions line " + std::to_string(lineno) + ": bad offered set");
        std::sort(r.offered.begin(), r.offered.end());
        r.offered.erase(std::unique(r.offered.begin(), r.offered.end()), r.offered.end());
        std::string ch = trim(f[width - 1]);
        if (ch == "none" || ch.empty()) {
            r.chosen = -1;
        } else {
            try {
                r.chosen = std::stoi(ch);
            } catch (const std::exception&) {
                throw std::runtime_error("transactions line " + std::to_string(lineno) + ": bad chosen value");
            }
            if (!std::binary_search(r.offered.begin(), r.offered.end(), r.chosen))
                throw std::runtime_error("transactions line " + std::to_string(lineno) + ": chosen product not offered");
        }
        if (r.offered.empty()) throw std::runtime_error("transactions line " + std::to_string(lineno) + ": empty offer");
        out.push_back(std::move(r));
    }
    return out;
}

double mnl_loglik(const std::vector<double>& u, const ChoiceData& d, double ridge) {
    double ll = 0.0;
    for (std::size_t r = 0; r < d.offered.size(); ++r) {
        const auto& S = d.offered[r];
        // Log-sum-exp with the outside option at utility 0 when it is modeled.
        double mx = d.outside_observed ? 0.0 : -INFINITY;
        for (int k : S) mx = std::max(mx, u[k]);
        double z = d.outside_observed ? std::exp(-mx) : 0.0;
        for (int k : S) z += std::exp(u[k] - mx);
        ll += (d.chosen[r] >= 0 ? u[d.chosen[r]] : 0.0) - (mx + std::log(z));
    }
    for (double x : u) ll -= 0.5 * ridge * x * x;
    return ll;
}

void mnl_gradient(const std::vector<double>& u, const ChoiceData& d, double ridge, std::vector<double>& g) {
    g.assign(u.size(), 0.0);
    for (std::size_t r = 0; r < d.offered.size(); ++r) {
        const auto& S = d.offered[r];
        double mx = d.outside_observed ? 0.0 : -INFINITY;
        for (int k : S) mx = std::max(mx, u[k]);
        double z = d.outside_observed ? std::exp(-mx) : 0.0;
        for (int k : S) z += std::exp(u[k] - mx);
        for (int k : S) g[k] -= std::exp(u[k] - mx) / z;
        if (d.chosen[r] >= 0) g[d.chosen[r]] += 1.0;
    }
    for (std::size_t k = 0; k < u.size(); ++k) g[k] -= ridge * u[k];
}

namespace {

// Negative Hessian (positive semidefinite) of the log-likelihood.
void neg_hessian(const std::vector<double>& u, const ChoiceData& d, double ridge, std::vector<std::vector<double>>& H) {
    const std::size_t P = u.size();
    H.assign(P, std::vector<double>(P, 0.0));
    std::vector<double> p;
    for (const auto& S : d.offered) {
        double mx = d.outside_observed ? 0.0 : -INFINITY;
        for (int k : S) mx = std::max(mx, u[k]);
        double z = d.outside_observed ? std::exp(-mx) : 0.0;
        for (int k : S) z += std::exp(u[k] - mx);
        p.resize(S.size());
        for (std::size_t a = 0; a < S.size(); ++a) p[a] = std::exp(u[S[a]] - mx) / z;
        for (std::size_t a = 0; a < S.size(); ++a) {
            H[S[a]][S[a]] += p[a];
            for (std::size_t b = 0; b < S.size(); ++b) H[S[a]][S[b]] -= p[a] * p[b];
        }
    }
    for (std::size_t k = 0; k < P; ++k) H[k][k] += ridge;
}

// Solves A x = b for symmetric positive definite A; false when A is not.
bool cholesky_solve(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = A.size();
    for (std::size_t j = 0; j < n; ++j) {
        double s = A[j][j];
        for (std::size_t k = 0; k < j; ++k) s -= A[j][k] * A[j][k];
        if (!(s > 1e-14)) return false;
        A[j][j] = std::sqrt(s);
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = A[i][j];
            for (std::size_t k = 0; k < j; ++k) t -= A[i][k] * A[j][k];
            A[i][j] = t / A[j][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= A[i][k] * b[k];
        b[i] /= A[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= A[k][i] * b[k];
        b[i] /= A[i][i];
    }
    x = std::move(b);
    return true;
}

struct Ascent {
    std::vector<double> u;
    bool converged = false;
    int iterations = 0;
};

// Damped Newton ascent in the free coordinates. Without an outside option
// the utilities of offered products are only identified up to a shift, so
// the iterate lives on sum(u over active) = 0: coordinates are differences
// to the last active product.
Ascent ascend(const ChoiceData& d, int P, const std::vector<char>& active, double ridge, const FitOptions& opt) {
    std::vector<int> act;
    for (int k = 0; k < P; ++k)
        if (active[k]) act.push_back(k);
    const bool shift = !d.outside_observed && !act.empty();
    const std::size_t dim = shift ? act.size() - 1 : act.size();
    Ascent a;
    a.u.assign(P, 0.0);
    std::vector<double> g, step;
    std::vector<std::vector<double>> H;
    // Tangent basis: e_k - mean over active for the first dim actives.
    auto lift = [&](const std::vector<double>& th, std::vector<double>& du) {
        du.assign(P, 0.0);
        for (std::size_t c = 0; c < dim; ++c) du[act[c]] += th[c];
        if (shift) {
            double mean = 0.0;
            for (std::size_t c = 0; c < dim; ++c) mean += th[c];
            mean /= double(act.size());
            for (int k : act) du[k] -= mean;
        }
    };
    auto proj_norm = [&](const std::vector<double>& gg) {
        double mean = 0.0, s = 0.0;
        if (shift) {
            for (int k : act) mean += gg[k];
            mean /= double(act.size());
        }
        for (int k : act) s += (gg[k] - mean) * (gg[k] - mean);
        return std::sqrt(s);
    };
    double ll = mnl_loglik(a.u, d, ridge);
    for (a.iterations = 0; a.iterations < opt.max_iter; ++a.iterations) {
        mnl_gradient(a.u, d, ridge, g);
        if (proj_norm(g) <= opt.tol) {
            a.converged = true;
            break;
        }
        // Reduced system in the tangent basis B: (B^T H B) th = B^T g.
        std::vector<double> rg(dim), th;
        std::vector<double> e(dim), col;
        neg_hessian(a.u, d, ridge, H);
        std::vector<std::vector<double>> RH(dim, std::vector<double>(dim, 0.0));
        std::vector<std::vector<double>> Bcols(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            std::fill(e.begin(), e.end(), 0.0);
            e[c] = 1.0;
            lift(e, Bcols[c]);
        }
        for (std::size_t c = 0; c < dim; ++c) {
            for (int k = 0; k < P; ++k) rg[c] += Bcols[c][k] * g[k];
            for (std::size_t c2 = 0; c2 < dim; ++c2) {
                double s = 0.0;
                for (int k : act)
                    for (int k2 : act) s += Bcols[c][k] * H[k][k2] * Bcols[c2][k2];
                RH[c][c2] = s;
            }
        }
        if (!cholesky_solve(RH, rg, th)) th = rg;  // gradient step on a flat Hessian
        lift(th, step);
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            std::vector<double> cand = a.u;
            for (int k = 0; k < P; ++k) cand[k] += t * step[k];
            double c = mnl_loglik(cand, d, ridge);
            if (c >= ll) {
                a.u = std::move(cand);
                ll = c;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (*std::max_element(a.u.begin(), a.u.end()) > 50.0 || *std::min_element(a.u.begin(), a.u.end()) < -50.0)
            break;
    }
    return a;
}

// True when the likelihood keeps rising along the ray through u, which
// happens only for separated data.
bool unbounded_along(const std::vector<double>& u, const ChoiceData& d) {
    double nrm = 0.0;
    for (double x : u) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) return false;
    std::vector<double> far = u;
    for (auto& x : far) x += 5.0 * x / nrm;
    return mnl_loglik(far, d, 0.0) >= mnl_loglik(u, d, 0.0) - 1e-12;
}

}  // namespace

MnlFit fit_mnl_type(const ChoiceData& d, int P, const FitOptions& opt) {
    if (d.offered.empty()) throw std::invalid_argument("fit_mnl: a type has no records");
    std::vector<char> active(P, 0);
    for (const auto& S : d.offered)
        for (int k : S) {
            if (k < 0 || k >= P) throw std::invalid_argument("fit_mnl: product id out of range");
            active[k] = 1;
        }
    MnlFit fit;
    Ascent a = ascend(d, P, active, 0.0, opt);
    if (!a.converged || unbounded_along(a.u, d)) {
        a = ascend(d, P, active, opt.ridge, opt);
        fit.regularized = true;
        fit.warning = "separable or degenerate data; ridge fallback applied";
    }
    fit.utilities = a.u;
    fit.converged = a.converged;
    fit.iterations = a.iterations;
    fit.model.kind = ChoiceKind::Mnl;
    fit.model.weights.resize(P);
    // A product never offered to this type has no identifiable weight; 0 keeps it out of its choices.
    for (int k = 0; k < P; ++k) fit.model.weights[k] = active[k] ? std::exp(a.u[k]) : 0.0;
    fit.model.no_purchase = 1.0;
    if (opt.shift_no_purchase) {
        double vmax = 0.0;
        for (int k = 0; k < P; ++k)
            if (active[k]) vmax = std::max(vmax, fit.model.weights[k]);
        fit.model.no_purchase = (vmax > 0 ? vmax : 1.0) * std::max(1.0, opt.scale_factor);
    }
    return fit;
}

MnlFitResult fit_mnl(const std::vector<TransactionRecord>& records, int P, const FitOptions& opt) {
    std::map<std::vector<std::string>, ChoiceData> by_type;
    for (const auto& r : records) {
        auto& d = by_type[r.features];
        d.offered.push_back(r.offered);
        d.chosen.push_back(r.chosen);
        if (r.chosen < 0) d.outside_observed = true;
    }
    MnlFitResult out;
    for (const auto& [key, d] : by_type) {
        out.type_keys.push_back(key);
        out.fits.push_back(fit_mnl_type(d, P, opt));
    }
    return out;
}

}  // namespace mcao
