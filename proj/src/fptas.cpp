#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcao/colgen.hpp"

namespace mcao {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// base * (1 + eps)^l for l = 0.. until the top is reached; top is appended
// exactly so the last guess covers the whole range.
std::vector<double> geometric_grid(double base, double top, double eps) {
    std::vector<double> g;
    for (double x = base; x < top * (1.0 - 1e-12); x *= 1.0 + eps) g.push_back(x);
    g.push_back(top);
    return g;
}

}  // namespace

int fptas_I(int n, double eps) { return std::max(0, int(std::floor(n / eps)) - n); }
int fptas_J(int n, double eps) { return int(std::ceil(n / eps)) + n; }

void fptas_discretize(const std::vector<double>& w, const std::vector<double>& v, double gamma, double delta,
                      double eps, std::vector<long>& wt, std::vector<long>& vt) {
    const double n = double(w.size());
    wt.resize(w.size());
    vt.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        // Relative slack keeps exact grid hits from rounding the wrong way.
        wt[i] = long(std::floor(n * w[i] * v[i] / (eps * gamma) * (1.0 + 1e-12)));
        vt[i] = long(std::ceil(n * v[i] / (eps * delta) * (1.0 - 1e-12)));
    }
}

DpTable dp_layers(const std::vector<long>& wt, const std::vector<long>& vt, const std::vector<double>& mass, int I,
                  int J) {
    const int n = int(wt.size());
    DpTable V(n + 1, std::vector<std::vector<double>>(I + 1, std::vector<double>(J + 1, kInf)));
    for (int b = 0; b <= J; ++b) V[0][0][b] = 0.0;
    for (int c = 1; c <= n; ++c) {
        for (int a = 0; a <= I; ++a)
            for (int b = 0; b <= J; ++b) {
                double best = V[c - 1][a][b];
                long pb = b - vt[c - 1];
                if (pb >= 0) {
                    long pa = std::max(0L, long(a) - wt[c - 1]);
                    best = std::min(best, mass[c - 1] + V[c - 1][pa][pb]);
                }
                V[c][a][b] = best;
            }
    }
    return V;
}

double certified_alpha(double f, double h) {
    if (h <= 0.0) return 0.0;
    if (f <= h) return kInf;
    return 2.0 * h / (f - h);
}

double fptas_factor(double alpha_c, double eps) { return 1.0 - (alpha_c + 1.0) * eps; }

bool fptas_hypothesis(double alpha_c, double eps) { return alpha_c >= 0.0 && alpha_c < 1.0 / eps - 1.0; }

namespace {

// One knapsack table over (a, b) updated in place item by item. Each cell
// carries the min-mass set's sum w v (N) and sum v (D) so candidates can be
// scored without backtracking.
struct Dp {
    int I, J;
    std::vector<double> V, N, D;
    std::vector<std::vector<char>> take;  // per layer, only when reconstructing

    Dp(int I_, int J_) : I(I_), J(J_) {}
    std::size_t at(int a, int b) const { return std::size_t(a) * (J + 1) + b; }

    void reset() {
        const std::size_t sz = std::size_t(I + 1) * (J + 1);
        V.assign(sz, kInf);
        N.assign(sz, 0.0);
        D.assign(sz, 0.0);
        for (int b = 0; b <= J; ++b) V[at(0, b)] = 0.0;
    }

    // Adds item c; calls on_improve(a, b) for cells whose set changed.
    template <class F>
    void add(long wt, long vt, double mass, double wv, double v, bool record, F&& on_improve) {
        if (record) take.emplace_back(V.size(), 0);
        // Descending b reads only cells of the previous layer since vt >= 1.
        for (int b = J; b >= vt; --b)
            for (int a = I; a >= 0; --a) {
                std::size_t from = at(int(std::max(0L, long(a) - wt)), int(b - vt));
                if (V[from] == kInf) continue;
                double m = V[from] + mass;
                std::size_t to = at(a, b);
                double nN = N[from] + wv, nD = D[from] + v;
                bool better = m < V[to] - 1e-15;
                if (!better && m <= V[to] + 1e-15) better = nN / (1.0 + nD) > N[to] / (1.0 + D[to]) + 1e-15;
                if (!better) continue;
                V[to] = m;
                N[to] = nN;
                D[to] = nD;
                if (record) take.back()[to] = 1;
                on_improve(a, b);
            }
    }
};

struct Candidate {
    double score = 0.0;  // f - h
    int gi = -1, di = -1, layer = -1, a = 0, b = 0;
};

}  // namespace

OracleResult subproblem_mnl_fptas(const Subproblem& sp, const FptasConfig& cfg, FptasStats* stats) {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw std::invalid_argument("fptas: eps must lie in (0, 1)");
    if (!sp.choice || sp.choice->kind != ChoiceKind::Mnl) throw std::invalid_argument("fptas: MNL choice model required");
    if (sp.family.mode != Family::Mode::UpTo || sp.family.k < sp.num_products)
        throw std::invalid_argument("fptas: family must not cap the assortment size");
    const ChoiceModel& ch = *sp.choice;
    const double v0 = ch.no_purchase;

    // Items with w <= 0 or v = 0 never raise f and cannot lower h.
    std::vector<int> ids;
    std::vector<double> w, v, s;
    for (int k = 0; k < sp.num_products; ++k)
        if (sp.w[k] > 0.0 && ch.weights[k] > 0.0) {
            ids.push_back(k);
            w.push_back(sp.w[k]);
            v.push_back(ch.weights[k] / v0);
            s.push_back(std::max(0.0, sp.sigma[k]));
        }
    OracleResult res;
    if (ids.empty()) return res;
    if (std::all_of(s.begin(), s.end(), [](double x) { return x == 0.0; })) return subproblem_mnl_repeated(sp);

    const int n = int(ids.size());
    const double eps = cfg.eps;
    double smin = kInf, smax = 0.0, wvmin = kInf, wvmax = 0.0, vmin = kInf, vmax = 0.0, wmin = kInf, wmax = 0.0;
    bool zero_sigma = false;
    for (int i = 0; i < n; ++i) {
        if (s[i] > 0.0) smin = std::min(smin, s[i]);
        else zero_sigma = true;
        smax = std::max(smax, s[i]);
        wvmin = std::min(wvmin, w[i] * v[i]);
        wvmax = std::max(wvmax, w[i] * v[i]);
        vmin = std::min(vmin, v[i]);
        vmax = std::max(vmax, v[i]);
        wmin = std::min(wmin, w[i]);
        wmax = std::max(wmax, w[i]);
    }
    std::vector<double> Phi = geometric_grid(smin, n * smax, eps);
    // Zero-sigma items admit sets of zero mass, below the positive anchor.
    if (zero_sigma) Phi.insert(Phi.begin(), 0.0);
    const std::vector<double> Gam = geometric_grid(wvmin, n * wvmax, eps);
    const std::vector<double> Del = geometric_grid(vmin, n * vmax, eps);
    const int I = fptas_I(n, eps), J = fptas_J(n, eps);
    const int L = int(Phi.size());
    if (stats) {
        stats->phi_points = Phi.size();
        stats->gamma_points = Gam.size();
        stats->delta_points = Del.size();
        stats->dp_runs = 0;
    }

    Dp dp(I, J);
    std::vector<long> wt, vt;
    std::vector<double> bestf(L);
    std::vector<Candidate> bestc(L);
    Candidate global;  // the empty set scores 0
    const double lo = wmin / ((1.0 + eps) * (1.0 + eps)), hi = wmax * (1.0 + eps) * (1.0 + eps);
    for (int gi = 0; gi < int(Gam.size()); ++gi)
        for (int di = 0; di < int(Del.size()); ++di) {
            if (cfg.prune_pairs) {
                double ratio = Gam[gi] / Del[di];
                if (ratio < lo || ratio > hi) continue;
            }
            fptas_discretize(w, v, Gam[gi], Del[di], eps, wt, vt);
            std::fill(bestf.begin(), bestf.end(), -kInf);
            dp.reset();
            for (int c = 0; c < n; ++c) {
                dp.add(wt[c], vt[c], s[c], w[c] * v[c], v[c], false, [&](int a, int b) {
                    std::size_t cell = dp.at(a, b);
                    double m = dp.V[cell];
                    int l = int(std::lower_bound(Phi.begin(), Phi.end(), m - 1e-12 * std::max(1.0, m)) - Phi.begin());
                    if (l >= L) return;
                    double f = dp.N[cell] / (1.0 + dp.D[cell]);
                    if (f > bestf[l]) {
                        bestf[l] = f;
                        bestc[l] = {f - m, gi, di, c, a, b};
                    }
                });
            }
            if (stats) ++stats->dp_runs;
            // S_{gamma,delta,phi}: best f among cells with mass <= phi.
            double run = -kInf;
            Candidate runc;
            for (int l = 0; l < L; ++l) {
                if (bestf[l] > run) {
                    run = bestf[l];
                    runc = bestc[l];
                }
                if (runc.gi >= 0 && runc.score > global.score + 1e-15) global = runc;
            }
        }
    if (global.gi < 0) return res;

    // Replay the winning DP with choice bits and walk back from the cell.
    fptas_discretize(w, v, Gam[global.gi], Del[global.di], eps, wt, vt);
    dp.reset();
    dp.take.clear();
    for (int c = 0; c <= global.layer; ++c) dp.add(wt[c], vt[c], s[c], w[c] * v[c], v[c], true, [](int, int) {});
    // A cell's set was last written at some layer <= c; walk layers downwards.
    int a = global.a, b = global.b;
    for (int c = global.layer; c >= 0; --c) {
        std::size_t cell = dp.at(a, b);
        if (!dp.take[c][cell]) continue;
        res.set.push_back(ids[c]);
        a = int(std::max(0L, long(a) - wt[c]));
        b = int(b - vt[c]);
    }
    std::sort(res.set.begin(), res.set.end());
    res.value = subproblem_value(sp, res.set);
    if (res.value < 0.0) {
        res.set.clear();
        res.value = 0.0;
    }
    return res;
}

}  // namespace mcao
