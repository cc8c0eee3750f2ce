#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <stdexcept>

#include "mcao/lpcore.hpp"
#include "mcao/simlab.hpp"

namespace mcao {

Instance gen_hardness_instance(int n) {
    if (n < 1) throw std::invalid_argument("gen_hardness_instance: n must be positive");
    Instance inst;
    inst.T = n;
    inst.items.assign(n, Item{});
    make_unit_products(inst);
    inst.family = Family::up_to(1);
    inst.matching = true;
    CustomerType ty;
    ty.arrival = 1.0 / n;
    ty.patience = n;
    ty.revenue.assign(n, 1.0);
    if (n == 1) {
        ty.choice.kind = ChoiceKind::Tabular;
        ty.choice.table[{0}] = {1.0};
    } else {
        // v / (v0 + v) = 1/n on every singleton.
        ty.choice.kind = ChoiceKind::Mnl;
        ty.choice.weights.assign(n, 1.0);
        ty.choice.no_purchase = n - 1.0;
    }
    inst.types.assign(n, ty);
    return inst;
}

double hardness_limit() { return 1.0 - std::log(2.0 - std::exp(-1.0)); }

std::vector<Assortment> gap_bases(int M) {
    if (M < 4 || M % 2) throw std::invalid_argument("gen_gap_instance: M must be even and at least 4");
    std::vector<Assortment> bases(M);
    int id = 0;
    for (int a = 0; a < M; ++a)
        for (int b = a + 1; b < M; ++b, ++id) {
            bases[a].push_back(id);
            bases[b].push_back(id);
        }
    for (auto& B : bases) std::sort(B.begin(), B.end());
    return bases;
}

Instance gen_gap_instance(int M) {
    std::vector<Assortment> bases = gap_bases(M);
    const int items = M * (M - 1) / 2;
    const double p = 2.0 / (double(M) * (M - 1));
    Instance inst;
    inst.T = 1;
    inst.items.assign(items, Item{});
    make_unit_products(inst);
    std::vector<Assortment> fam;
    if (M <= kGapClosureLimitM) {
        std::set<Assortment> closure;
        for (const auto& B : bases)
            for (unsigned mask = 1; mask < (1u << B.size()); ++mask) {
                Assortment S;
                for (std::size_t u = 0; u < B.size(); ++u)
                    if (mask >> u & 1u) S.push_back(B[u]);
                closure.insert(S);
            }
        fam.assign(closure.begin(), closure.end());
    } else {
        fam = bases;
    }
    inst.family = Family::explicit_list(fam);
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = M / 2;
    ty.revenue.assign(items, 1.0);
    ty.choice.kind = ChoiceKind::Tabular;
    for (const auto& S : inst.family.sets) ty.choice.table[S] = std::vector<double>(S.size(), p);
    inst.types.push_back(std::move(ty));
    return inst;
}

double gap_sale_bound(int M) {
    double m = M;
    return 1.0 - std::exp(-3.0 * m * m / (4.0 * m * (m - 1.0))) + 1.0 / m;
}

double gap_greedy_sale_prob(int M) {
    const double p = 2.0 / (double(M) * (M - 1));
    double none = 1.0;
    // The a-th base shares one item with each of the a bases shown before it.
    for (int a = 0; a < M / 2; ++a) none *= 1.0 - (M - 1 - a) * p;
    return 1.0 - none;
}

GapLp gap_lp_opt(int M) {
    std::vector<Assortment> bases = gap_bases(M);
    const int items = M * (M - 1) / 2;
    const double p = 2.0 / (double(M) * (M - 1));
    LpModel lp;
    for (int i = 0; i < items; ++i) lp.add_row("inv[" + std::to_string(i) + "]", {}, 1.0);
    const int sell = lp.add_row("sell", {}, 1.0);
    const int pat = lp.add_row("pat", {}, M / 2.0);
    const int ovl = items + 2;
    for (int i = 0; i < items; ++i) lp.add_row("ovl[" + std::to_string(i) + "]", {}, 1.0);
    std::set<Assortment> present;
    auto add = [&](const Assortment& S) {
        // The overlap rows bound x by 1, so the box stays inactive.
        int v = lp.add_var(S.size() * p, 0.0, 2.0);
        for (int i : S) {
            lp.rows[i].coefs.push_back({v, p});
            lp.rows[ovl + i].coefs.push_back({v, 1.0});
        }
        lp.rows[sell].coefs.push_back({v, S.size() * p});
        lp.rows[pat].coefs.push_back({v, 1.0});
        present.insert(S);
    };
    for (const auto& B : bases) add(B);
    GapLp out;
    for (;;) {
        LpSolution sol = solve(lp);
        if (sol.status != LpStatus::Optimal) throw std::runtime_error("gap LP did not solve");
        ++out.rounds;
        out.opt = sol.objective;
        const double gamma = sol.y[sell], beta = sol.y[pat];
        out.max_reduced_cost = -beta;
        std::vector<Assortment> fresh;
        for (const auto& B : bases) {
            Assortment S;
            double val = 0.0;
            for (int i : B) {
                double margin = (1.0 - sol.y[i] - gamma) * p - sol.y[ovl + i];
                if (margin > 0.0) {
                    S.push_back(i);
                    val += margin;
                }
            }
            out.max_reduced_cost = std::max(out.max_reduced_cost, val - beta);
            if (val > beta + 1e-9 && !present.count(S)) fresh.push_back(S);
        }
        if (fresh.empty()) break;
        for (const auto& S : fresh) add(S);
    }
    out.columns = lp.num_vars();
    return out;
}

HotelTemplate gen_hotel_like(std::uint64_t seed, int types) {
    if (types < 1) throw std::invalid_argument("gen_hotel_like: need at least one type");
    HotelTemplate h;
    h.rooms = {"King", "Queen", "Suite", "Two-Double"};
    h.low_fare = {307, 304, 384, 306};
    h.high_fare = {361, 361, 496, 342};
    h.share = {0.52, 0.15, 0.13, 0.20};
    h.types = types;
    std::normal_distribution<double> room(0.0, 0.5), extra(-0.2, 0.3);
    for (int j = 0; j < types; ++j) {
        Rng rng = make_rng(seed, std::uint64_t(j));
        std::vector<double> w(8);
        for (int r = 0; r < 4; ++r) {
            double u = room(rng);
            w[2 * r] = std::exp(u);
            w[2 * r + 1] = std::exp(u + extra(rng));
        }
        h.weights.push_back(std::move(w));
    }
    return h;
}

void draw_fares(const HotelTemplate& tpl, double sf, Rng& rng, std::vector<double>& low, std::vector<double>& high) {
    const std::size_t R = tpl.rooms.size();
    low.resize(R);
    high.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
        const double lo_mean = tpl.low_fare[r], hi_mean = tpl.high_fare[r] * sf;
        std::normal_distribution<double> dl(lo_mean, std::sqrt(lo_mean)), dh(hi_mean, std::sqrt(hi_mean));
        low[r] = std::max(0.0, dl(rng));
        int attempt = 0;
        do {
            high[r] = dh(rng);
        } while (high[r] <= low[r] && ++attempt < 100);
        if (high[r] <= low[r]) high[r] = low[r] + 1.0;
    }
}

Instance build_hotel_instance(const HotelTemplate& tpl, const HotelCell& cell, std::uint64_t seed) {
    if (!(cell.loading_factor > 0.0)) throw std::invalid_argument("hotel: loading factor must be positive");
    const int m = tpl.types, R = int(tpl.rooms.size());
    Instance inst;
    inst.T = m;
    inst.price_levels = 2;
    // Largest-remainder split of T / LF units across rooms.
    const long total = std::lround(m / cell.loading_factor);
    std::vector<long> inv(R);
    std::vector<std::pair<double, int>> rem;
    long used = 0;
    for (int r = 0; r < R; ++r) {
        double exact = total * tpl.share[r];
        inv[r] = long(std::floor(exact));
        used += inv[r];
        rem.push_back({exact - inv[r], r});
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (long k = 0; k < total - used; ++k) ++inv[rem[k % R].second];
    for (int r = 0; r < R; ++r) inst.items.push_back(Item{int(inv[r]), -1});
    for (int r = 0; r < R; ++r) {
        inst.products.push_back({r, 0});
        inst.products.push_back({r, 1});
    }
    inst.family = Family::up_to(cell.cap);
    std::uint64_t sf_bits;
    std::memcpy(&sf_bits, &cell.scale_factor, sizeof sf_bits);
    std::vector<double> low, high;
    for (int j = 0; j < m; ++j) {
        Rng rng = make_rng(mix_seed(seed, sf_bits), std::uint64_t(j));
        draw_fares(tpl, cell.scale_factor, rng, low, high);
        CustomerType ty;
        ty.arrival = 1.0 / m;
        ty.patience = cell.patience;
        ty.revenue.resize(2 * R);
        for (int r = 0; r < R; ++r) {
            ty.revenue[2 * r] = low[r];
            ty.revenue[2 * r + 1] = high[r];
        }
        ty.choice.kind = ChoiceKind::Mnl;
        ty.choice.weights = tpl.weights[j];
        // No-purchase weight equals the top product weight, times the scale factor.
        ty.choice.no_purchase = *std::max_element(ty.choice.weights.begin(), ty.choice.weights.end()) *
                                std::max(1.0, cell.scale_factor);
        inst.types.push_back(std::move(ty));
    }
    return inst;
}

}  // namespace mcao
