// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
// Seeds are fixed, so the output is reproducible.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcao/attenuate.hpp"
#include "mcao/blackbox.hpp"
#include "mcao/colgen.hpp"
#include "mcao/mcdlp.hpp"
#include "mcao/norepeat.hpp"
#include "mcao/rounding.hpp"
#include "mcao/simlab.hpp"
#include "../tests/support.hpp"

using namespace mcao;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double sd(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

// ---- 1, 2 ----

Outcome gamma_criterion() {
    GammaSchedule g = gamma_schedule(100000);
    const double last = g.last(), ratio = g.ratio();
    Outcome o;
    o.pass = last > 0.4880 && last <= 0.4900 && ratio >= 0.5100 - 1e-3;
    o.detail = fmt("gamma_{T+1} = %.6f, mean(1 - e^-gamma) = %.6f", last, ratio);
    return o;
}

Outcome h_criterion() {
    // ln(2 - 1/e) evaluated independently to 14 digits. The 0.489995 quoted
    // alongside the formula is an arithmetic slip; the formula governs.
    constexpr double kH = 0.48988012564475, kRatio = 0.51011987435525;
    const double h = h_limit(1.0);
    Outcome o;
    o.pass = std::abs(h - kH) <= 1e-9 && std::abs((1.0 - h) - kRatio) <= 1e-9 &&
             std::abs(hardness_limit() - (1.0 - h)) <= 1e-9 && std::abs((1.0 - h) - 0.51) < 0.005;
    o.detail = fmt("h(1) = %.9f, 1 - h(1) = %.9f", h, 1.0 - h);
    return o;
}

// ---- 3 ----

Outcome gkps_criterion() {
    Rng gen = make_rng(301, 0);
    std::uniform_int_distribution<int> size(2, 6);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    const int vectors = 50, N = 100000;
    long degree_bad = 0, marg_bad = 0, corr_bad = 0;
    for (int v = 0; v < vectors; ++v) {
        const int n = size(gen);
        std::vector<double> z(n);
        for (auto& x : z) x = w(gen);
        const double s = std::accumulate(z.begin(), z.end(), 0.0);
        Rng rng = make_rng(302, v);
        std::vector<double> one(n, 0.0);
        std::vector<double> both1(n * n, 0.0), both0(n * n, 0.0);
        for (int r = 0; r < N; ++r) {
            auto Z = gkps_round(z, rng);
            int k = std::accumulate(Z.begin(), Z.end(), 0);
            if (k < std::floor(s + 1e-9) || k > std::ceil(s - 1e-9)) ++degree_bad;
            for (int i = 0; i < n; ++i) {
                one[i] += Z[i];
                for (int j = i + 1; j < n; ++j) {
                    both1[i * n + j] += Z[i] && Z[j];
                    both0[i * n + j] += !Z[i] && !Z[j];
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            if (std::abs(one[i] / N - z[i]) > 4 * sd(z[i], N)) ++marg_bad;
            for (int j = i + 1; j < n; ++j) {
                double p11 = both1[i * n + j] / N, p00 = both0[i * n + j] / N;
                if (p11 > z[i] * z[j] + 4 * sd(p11, N)) ++corr_bad;
                if (p00 > (1 - z[i]) * (1 - z[j]) + 4 * sd(p00, N)) ++corr_bad;
            }
        }
    }
    Outcome o;
    o.pass = degree_bad == 0 && marg_bad == 0 && corr_bad == 0;
    o.detail = fmt("degree violations %.0f, marginals beyond 4 sd %.0f, correlation violations %.0f", double(degree_bad),
                   double(marg_bad), double(corr_bad));
    return o;
}

// ---- 4 ----

CoinSet random_coins(Rng& rng, CoinCase want) {
    std::uniform_int_distribution<int> size(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = size(rng);
    CoinSet c;
    for (int i = 0; i < n; ++i) c.p.push_back(u(rng));
    if (want == CoinCase::SmallProbs) {
        double s = std::accumulate(c.p.begin(), c.p.end(), 0.0);
        for (auto& v : c.p) v /= s * (1.0 + u(rng));
        c.patience = std::uniform_int_distribution<int>(1, n - 1)(rng);
    } else {
        c.patience = n;
    }
    double load = 0.0, sx = 0.0;
    for (int i = 0; i < n; ++i) {
        c.x.push_back(u(rng));
        load += c.p[i] * c.x[i];
        sx += c.x[i];
    }
    double scale = std::min({1.0, 1.0 / std::max(load, 1e-12), c.patience / sx});
    for (auto& v : c.x) v *= scale;
    c.tag = classify(c.p, c.patience);
    return c;
}

Outcome blackbox_criterion() {
    Rng gen = make_rng(401, 0);
    const int N = 100000;
    long coins = 0, bad = 0;
    for (CoinCase cs : {CoinCase::SmallProbs, CoinCase::FullPatience}) {
        for (int rep = 0; rep < 50; ++rep) {
            CoinSet c = random_coins(gen, cs);
            if (c.tag != cs) {
                ++bad;
                continue;
            }
            Rng rng = make_rng(402 + int(cs), rep);
            std::vector<double> hit(c.size(), 0.0);
            for (int r = 0; r < N; ++r) {
                FlipOutcome f = run_blackbox(c, rng);
                for (std::size_t i = 0; i < c.size(); ++i) hit[i] += f.flipped[i];
            }
            for (std::size_t i = 0; i < c.size(); ++i) {
                ++coins;
                double bound = c.x[i] * f_value(w_value(int(i), c));
                if (hit[i] / N < bound - 4 * sd(hit[i] / N, N)) ++bad;
            }
        }
    }
    // Ordering-key counter-example with e = 0.01: exact value 1/2 + e/2.
    const double e = 0.01;
    CoinSet c;
    c.p = {1 - e, 0.0, 1 - e};
    c.x = {1.0, 1 - e, e};
    c.patience = 2;
    c.tag = classify(c.p, c.patience);
    Rng rng = make_rng(403, 0);
    double in = 0, fl = 0, in_r = 0, fl_r = 0;
    for (int r = 0; r < 10000000; ++r) {
        FlipOutcome wrong = run_blackbox(c, KeyRule::SmallProbs, rng);
        if (wrong.rounded[2]) {
            ++in;
            fl += wrong.flipped[2];
        }
        FlipOutcome right = run_blackbox(c, KeyRule::FullPatience, rng);
        if (right.rounded[2]) {
            ++in_r;
            fl_r += right.flipped[2];
        }
    }
    const double pw = fl / in, pr = fl_r / in_r, target = f_value(w_value(2, c, KeyRule::FullPatience));
    const bool counter_ok = std::abs(pw - 0.5) <= 0.01 && pw < target && pr >= target - 4 * sd(pr, in_r);
    Outcome o;
    o.pass = bad == 0 && counter_ok;
    o.detail = fmt("%.0f coins, %.0f below bound; counter-example wrong key %.4f, right key %.4f", double(coins),
                   double(bad), pw, pr) +
               fmt(" (target %.4f)", target);
    return o;
}

// ---- 5 ----

Outcome algorithm1_criterion() {
    Rng gen = make_rng(501, 0);
    std::uniform_int_distribution<int> dn(4, 10), dm(2, 5), dT(6, 14);
    int done = 0, attempts = 0, avail_bad = 0, cells = 0;
    double worst = std::numeric_limits<double>::infinity();
    const std::uint64_t R = 10000;
    while (done < 10 && attempts < 100) {
        ++attempts;
        const int n = dn(gen);
        Instance inst = testing::random_instance(gen, {.n = n, .m = dm(gen), .T = dT(gen), .matching = true});
        for (auto& ty : inst.types) ty.patience = n;  // patience covers the support
        McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::SingleItemLP);
        AttenPlan plan = AttenPlan::from(sol);
        AttenuationOptions opt;
        opt.budget = 2000;
        AttenuationState st = compute_attenuation(inst, plan, opt, mix_seed(502, done));
        if (!st.guarantee || sol.opt <= 0.0) continue;
        AttenEvaluation ev = evaluate_attenuated(inst, plan, st, R, mix_seed(503, done));
        worst = std::min(worst, ev.revenue.mean / sol.opt);
        for (int t = 0; t <= inst.T; ++t)
            for (int i = 0; i < inst.n(); ++i) {
                const double g = st.gamma.gamma[t];
                ++cells;
                if (std::abs(ev.avail[t][i] - g) > 4 * (sd(g, R) + sd(g, st.budget))) ++avail_bad;
            }
        ++done;
    }
    Outcome o;
    o.pass = done == 10 && worst >= 0.51 - 0.02 && avail_bad == 0;
    o.detail = fmt("%.0f instances, min ratio %.4f (need 0.49), availability off by > 4 sd in %.0f of %.0f cells", done,
                   worst, avail_bad, cells);
    return o;
}

// ---- 6 ----

Outcome hardness_criterion() {
    MonteCarloEstimate est = hardness_sold_fraction(500, 10000, 601);
    Outcome o;
    o.pass = est.mean >= 0.49 && est.mean <= 0.53 && est.mean <= hardness_limit() + 3 * est.se();
    o.detail = fmt("sold fraction %.4f +- %.4f, ceiling %.4f", est.mean, est.se(), hardness_limit());
    return o;
}

// ---- 7, 8 ----

Outcome algorithm3_criterion() {
    Rng gen = make_rng(701, 0);
    std::uniform_int_distribution<int> dn(3, 8), dm(2, 4);
    const std::uint64_t R = 20000;
    double worst = std::numeric_limits<double>::infinity();
    int ev_bad = 0, tested = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const int m = dm(gen);
        Instance inst = testing::random_instance(gen, {.n = dn(gen), .m = m, .T = m + 3, .k = 3, .integral = true});
        McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::McdlpNr);
        NoRepeatPlan plan = NoRepeatPlan::from(inst, sol);
        NoRepeatOptions opt;
        opt.alpha = alpha_star();
        NoRepeatEvaluation ev = evaluate_norepeat(inst, plan, opt, R, mix_seed(702, rep));
        worst = std::min(worst, ev.revenue.mean / sol.opt);
        const double a = ev.alpha;
        auto check = [&](const Freq& f, double bound) {
            if (f.n < kMinConditionSamples) return;
            ++tested;
            if (f.p() > bound + 3 * f.se()) ++ev_bad;
        };
        for (const auto& row : ev.imatch)
            for (const Freq& f : row) check(f, imatch_bound(a));
        for (const Freq& f : ev.seen) check(f, imatch_bound(a));
        for (const Freq& f : ev.timeout_cmatch) check(f, timeout_cmatch_bound(a));
    }
    Outcome o;
    o.pass = worst >= 0.093 - 0.02 && ev_bad == 0 && tested > 0;
    o.detail = fmt("min ratio %.4f (need 0.073), event bounds exceeded in %.0f of %.0f checks", worst, ev_bad, tested);
    return o;
}

Outcome modified_criterion() {
    Rng gen = make_rng(801, 0);
    std::uniform_int_distribution<int> dn(3, 8), dm(2, 4), dT(4, 10);
    const std::uint64_t R = 20000;
    double worst = std::numeric_limits<double>::infinity();
    int item_bad = 0, items = 0;
    for (int rep = 0; rep < 10; ++rep) {
        Instance inst = testing::random_instance(
            gen, {.n = dn(gen), .m = dm(gen), .T = dT(gen), .k = 3, .homogeneous = true, .nonstationary = rep % 2 == 1});
        McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::McdlpNrs);
        NoRepeatPlan plan = NoRepeatPlan::from(inst, sol);
        NoRepeatOptions opt;
        opt.variant = NoRepeatVariant::Modified;
        NoRepeatEvaluation ev = evaluate_norepeat(inst, plan, opt, R, mix_seed(802, rep));
        worst = std::min(worst, ev.revenue.mean / sol.opt);
        auto mass = item_purchase_mass(inst, plan);
        for (int i = 0; i < inst.n(); ++i) {
            ++items;
            double b = modified_item_bound(mass[i]);
            if (ev.sold[i].p() < b - 3 * sd(b, R)) ++item_bad;
        }
    }
    Outcome o;
    o.pass = worst >= 0.1535 - 0.02 && item_bad == 0;
    o.detail = fmt("min ratio %.4f (need 0.1335), per-item bound missed by > 3 sd in %.0f of %.0f items", worst,
                   item_bad, items);
    return o;
}

// ---- 9 ----

Outcome gap_criterion() {
    bool ok = true;
    std::ostringstream os;
    double prev = 1.0;
    for (int M : {4, 8, 20, 40}) {
        double opt = gap_lp_opt(M).opt;
        if (M <= kGapClosureLimitM) {
            double full = solve_mcdlp(gen_gap_instance(M), McdlpVariant::McdlpNrs).opt;
            ok &= std::abs(full - 1.0) <= 1e-6;
        }
        double b = gap_sale_bound(M);
        ok &= std::abs(opt - 1.0) <= 1e-6 && b <= prev + 1e-12;
        prev = b;
        os << "M=" << M << " OPT " << fmt("%.7f", opt) << " ceiling " << fmt("%.4f", b) << "; ";
    }
    const double limit = 1.0 - std::exp(-0.75);
    ok &= gap_sale_bound(40) <= 0.565 && gap_sale_bound(100000) - limit < 1e-4;
    Outcome o;
    o.pass = ok;
    o.detail = os.str() + fmt("limit %.4f", limit);
    return o;
}

// ---- 10, 11 ----

Outcome colgen_criterion() {
    Rng gen = make_rng(1001, 0);
    std::uniform_int_distribution<int> dn(3, 6), dm(2, 3);
    int exact_bad = 0, fptas_bad = 0;
    double min_factor = 1.0;
    for (int rep = 0; rep < 10; ++rep) {
        const int n = dn(gen), m = dm(gen);
        Instance inst = testing::random_instance(gen, {.n = n, .m = m, .T = m + 2, .k = n, .integral = true});
        double full = solve_mcdlp(inst, McdlpVariant::McdlpNr).opt;
        ColgenResult ex = column_generate(inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::Brute});
        if (ex.partial || std::abs(ex.solution.opt - full) > 1e-6) ++exact_bad;
        ColgenResult fp = column_generate(
            inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::MnlFptas, .fptas = {.eps = 0.1}});
        if (fp.partial || !std::isfinite(fp.alpha_hat) || fp.solution.opt < fp.alpha_hat * full - 1e-6) ++fptas_bad;
        if (std::isfinite(fp.alpha_hat)) min_factor = std::min(min_factor, fp.alpha_hat);
    }
    Outcome o;
    o.pass = exact_bad == 0 && fptas_bad == 0;
    o.detail = fmt("exact mismatches %.0f, FPTAS below factor %.0f, min measured factor %.4f", exact_bad, fptas_bad,
                   min_factor);
    return o;
}

// Exhaustive min-mass table for the first c items, all (a, b) cells at once:
// per subset, mark (min(sum wt, I), sum vt); then suffix-min over a, prefix-min over b.
DpTable exhaustive_tables(const std::vector<long>& wt, const std::vector<long>& vt, const std::vector<double>& mass,
                          int I, int J) {
    const int n = int(wt.size());
    const double inf = std::numeric_limits<double>::infinity();
    DpTable out(n + 1, std::vector<std::vector<double>>(I + 1, std::vector<double>(J + 1, inf)));
    for (int c = 0; c <= n; ++c) {
        auto& T = out[c];
        for (unsigned mask = 0; mask < (1u << c); ++mask) {
            long sw = 0, sv = 0;
            double sm = 0.0;
            for (int i = 0; i < c; ++i)
                if (mask >> i & 1u) {
                    sw += wt[i];
                    sv += vt[i];
                    sm += mass[i];
                }
            if (sv > J) continue;
            auto& cell = T[std::min<long>(sw, I)][sv];
            cell = std::min(cell, sm);
        }
        for (int a = I - 1; a >= 0; --a)
            for (int b = 0; b <= J; ++b) T[a][b] = std::min(T[a][b], T[a + 1][b]);
        for (int a = 0; a <= I; ++a)
            for (int b = 1; b <= J; ++b) T[a][b] = std::min(T[a][b], T[a][b - 1]);
    }
    return out;
}

Outcome fptas_criterion() {
    Rng gen = make_rng(1101, 0);
    std::uniform_int_distribution<int> dn(2, 10);
    std::uniform_real_distribution<double> wv(-2.0, 6.0), sg(0.0, 0.6), wt(0.1, 2.0), v0(0.3, 3.0);
    int checked = 0, below = 0, cell_bad = 0;
    long cells = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const int P = dn(gen);
        ChoiceModel ch;
        for (int k = 0; k < P; ++k) ch.weights.push_back(wt(gen));
        ch.no_purchase = v0(gen);
        Subproblem sp;
        sp.num_products = P;
        sp.choice = &ch;
        sp.family = Family::up_to(P);
        for (int k = 0; k < P; ++k) {
            sp.w.push_back(wv(gen));
            sp.sigma.push_back(sg(gen));
        }
        OracleResult best = subproblem_bruteforce(sp);
        double f = 0.0, h = 0.0, num = 0.0, den = 1.0;
        std::vector<double> w, v, s;
        for (int k : best.set) {
            f += sp.w[k] * ch.prob(k, best.set);
            h += sp.sigma[k];
            num += sp.w[k] * ch.weights[k] / ch.no_purchase;
            den += ch.weights[k] / ch.no_purchase;
        }
        for (double eps : {0.2, 0.1, 0.05}) {
            OracleResult got = subproblem_mnl_fptas(sp, {.eps = eps});
            const double ac = certified_alpha(f, h);
            if (!best.set.empty() && fptas_hypothesis(ac, eps)) {
                ++checked;
                if (got.value < fptas_factor(ac, eps) * best.value - 1e-9) ++below;
            }
            // DP layers under the guess taken from the optimum itself.
            if (best.set.empty()) continue;
            for (int k : best.set) {
                w.push_back(sp.w[k]);
                v.push_back(ch.weights[k] / ch.no_purchase);
                s.push_back(sp.sigma[k]);
            }
            const int n = int(w.size());
            std::vector<long> wtd, vtd;
            fptas_discretize(w, v, std::max(num, 1e-9), den - 1.0, eps, wtd, vtd);
            const int I = fptas_I(n, eps), J = fptas_J(n, eps);
            DpTable V = dp_layers(wtd, vtd, s, I, J), X = exhaustive_tables(wtd, vtd, s, I, J);
            for (int c = 0; c <= n; ++c)
                for (int a = 0; a <= I; ++a)
                    for (int b = 0; b <= J; ++b) {
                        ++cells;
                        double x = X[c][a][b], y = V[c][a][b];
                        if (std::isinf(x) != std::isinf(y) || (!std::isinf(x) && std::abs(x - y) > 1e-12)) ++cell_bad;
                    }
            w.clear();
            v.clear();
            s.clear();
        }
    }
    Outcome o;
    o.pass = below == 0 && cell_bad == 0 && checked > 0;
    o.detail = fmt("%.0f hypothesis cases, %.0f below factor; DP cells %.0f, mismatches %.0f", checked, below,
                   double(cells), cell_bad);
    return o;
}

// ---- 12, 13 ----

Outcome hotel_criterion() {
    HotelTemplate tpl = gen_hotel_like(1201);
    SweepSpec spec;
    spec.scale_factors = {2.0};
    spec.replicas = 2000;
    spec.seed = 1202;
    const std::vector<SweepPolicy> pols{SweepPolicy::Greedy, SweepPolicy::Conservative, SweepPolicy::Norepeat,
                                        SweepPolicy::NorepeatHomog};
    auto rows = run_sweep(tpl, spec, pols);
    auto again = run_sweep(tpl, spec, pols, ExecMode::Serial);
    std::ostringstream a, b;
    write_sweep_csv(a, rows);
    write_sweep_csv(b, again);
    bool bounded = true;
    for (const auto& r : rows) bounded &= r.status == "ok" && r.pct <= 100.0 + 3 * r.pct_se;
    auto best_at = [&](double lf) {
        const SweepRow* best = nullptr;
        for (const auto& r : rows)
            if (r.cell.loading_factor == lf && (!best || r.mean > best->mean)) best = &r;
        return best ? best->policy : std::string("none");
    };
    const double lo = spec.loading_factors.front(), hi = spec.loading_factors.back();
    const std::string bl = best_at(lo), bh = best_at(hi);
    Outcome o;
    o.pass = bounded && a.str() == b.str() && bl == "greedy" && bh == "conservative";
    o.detail = "best at LF " + fmt("%g", lo) + ": " + bl + ", at LF " + fmt("%g", hi) + ": " + bh +
               (bounded ? "; all within the bound" : "; bound exceeded") +
               (a.str() == b.str() ? "; CSV reproducible" : "; CSV differs between runs");
    return o;
}

Outcome mnl_criterion() {
    Rng gen = make_rng(1301, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int P = 2 + rep % 5;
        std::uniform_int_distribution<int> pick(0, P - 1);
        ChoiceData d;
        for (int r = 0; r < 60; ++r) {
            Assortment S;
            for (int k = 0; k < P; ++k)
                if (uniform01(gen) < 0.6) S.push_back(k);
            if (S.empty()) S.push_back(pick(gen));
            int c = pick(gen);
            d.offered.push_back(S);
            d.chosen.push_back(std::binary_search(S.begin(), S.end(), c) ? c : -1);
            d.outside_observed |= d.chosen.back() < 0;
        }
        std::vector<double> u(P), g;
        for (auto& x : u) x = 2.0 * uniform01(gen) - 1.0;
        const double ridge = rep % 2 ? 0.3 : 0.0;
        mnl_gradient(u, d, ridge, g);
        for (int k = 0; k < P; ++k) {
            auto up = u, dn = u;
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            double fd = (mnl_loglik(up, d, ridge) - mnl_loglik(dn, d, ridge)) / 2e-6;
            worst = std::max(worst, std::abs(g[k] - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    ChoiceData sym;
    for (int k = 0; k < 3; ++k)
        for (int r = 0; r < 12; ++r) {
            sym.offered.push_back({0, 1, 2});
            sym.chosen.push_back(k);
        }
    for (int r = 0; r < 9; ++r) {
        sym.offered.push_back({0, 1, 2});
        sym.chosen.push_back(-1);
    }
    sym.outside_observed = true;
    MnlFit fit = fit_mnl_type(sym, 3);
    const auto& wts = fit.model.weights;
    const double spread = std::max({std::abs(wts[0] - wts[1]), std::abs(wts[1] - wts[2]), std::abs(wts[0] - wts[2])});
    Outcome o;
    o.pass = worst <= 1e-5 && spread <= 1e-6 && fit.converged;
    o.detail = fmt("max relative gradient error %.2e, symmetric weight spread %.2e", worst, spread);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> all{
        {1, "gamma schedule", 1.0, gamma_criterion},
        {2, "h limit", 1.0, h_criterion},
        {3, "dependent rounding", 30.0, gkps_criterion},
        {4, "black-box flips", 120.0, blackbox_criterion},
        {5, "single-item attenuation", 600.0, algorithm1_criterion},
        {6, "hardness limit", 120.0, hardness_criterion},
        {7, "no-repeat policy", 600.0, algorithm3_criterion},
        {8, "no-repeat, homogeneous fares", 600.0, modified_criterion},
        {9, "integrality gap", 60.0, gap_criterion},
        {10, "column generation", 300.0, colgen_criterion},
        {11, "FPTAS vs brute force", 600.0, fptas_criterion},
        {12, "hotel sweep", 900.0, hotel_criterion},
        {13, "MNL estimation", 60.0, mnl_criterion},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.limit_s;
        bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s %2d %-30s %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.limit_s);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
