#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcao/blackbox.hpp"
#include "mcao/simlab.hpp"

namespace mcao {

const char* baseline_name(BaselineKind k) {
    switch (k) {
        case BaselineKind::Greedy: return "greedy";
        case BaselineKind::Conservative: return "conservative";
        case BaselineKind::OfferAll: return "offer-all";
    }
    return "?";
}

Assortment greedy_assortment(const Instance& inst, int type, const std::vector<int>& allowed) {
    const auto& ty = inst.types[type];
    Assortment best;
    double best_rev = 0.0;
    std::vector<double> probs;
    auto score = [&](const Assortment& S) {
        ty.choice.probs(S, probs);
        double r = 0.0;
        for (std::size_t u = 0; u < S.size(); ++u) r += ty.revenue[S[u]] * probs[u];
        return r;
    };
    auto consider = [&](const Assortment& S) {
        double r = score(S);
        // Strict improvement keeps the lexicographically first of tied sets.
        if (r > best_rev + 1e-12) {
            best_rev = r;
            best = S;
        }
    };
    if (inst.family.mode == Family::Mode::Explicit) {
        for (const auto& S : inst.family.sets)
            if (std::includes(allowed.begin(), allowed.end(), S.begin(), S.end())) consider(S);
        return best;
    }
    const int cap = inst.family.k, A = int(allowed.size());
    Assortment cur;
    auto rec = [&](auto&& self, int start) -> void {
        for (int u = start; u < A; ++u) {
            cur.push_back(allowed[u]);
            consider(cur);
            if (int(cur.size()) < cap) self(self, u + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

std::vector<int> conservative_products(const Instance& inst, int type) {
    const auto& ty = inst.types[type];
    std::vector<double> top(inst.n(), -1.0);
    for (int k = 0; k < inst.num_products(); ++k) {
        int i = inst.products[k].item;
        top[i] = std::max(top[i], ty.revenue[k]);
    }
    std::vector<int> out;
    for (int k = 0; k < inst.num_products(); ++k)
        if (ty.revenue[k] == top[inst.products[k].item]) out.push_back(k);
    return out;
}

PolicyTrace simulate_baseline(const Instance& inst, BaselineKind kind, std::uint64_t seed, std::uint64_t replica,
                              bool record, ReplicaOutcome* out) {
    if (kind == BaselineKind::Conservative && inst.price_levels < 2)
        throw std::invalid_argument("conservative policy needs at least two price levels");
    Rng rng = make_rng(seed, replica);
    PolicyTrace tr;
    tr.replica = replica;
    for (const auto& it : inst.items) tr.initial_inventory.push_back(it.inventory);
    std::vector<int> stock = tr.initial_inventory;
    std::vector<int> seen(inst.num_products(), -1);
    std::vector<std::vector<int>> cons;
    if (kind == BaselineKind::Conservative)
        for (int j = 0; j < inst.m(); ++j) cons.push_back(conservative_products(inst, j));
    std::vector<double> probs;
    std::vector<int> allowed;
    double revenue = 0.0;
    for (int t = 0; t < inst.T; ++t) {
        StepRecord rec;
        int j = draw_type(inst, t, rng);
        if (record) {
            rec.t = t;
            rec.type = j;
            for (int i = 0; i < inst.n(); ++i)
                if (stock[i] > 0) rec.available.push_back(i);
        }
        if (j >= 0) {
            const auto& ty = inst.types[j];
            for (int stage = 0;; ++stage) {
                if (!ty.random_patience() && stage >= ty.patience) break;
                allowed.clear();
                if (kind == BaselineKind::Conservative) {
                    for (int k : cons[j])
                        if (stock[inst.products[k].item] > 0 && seen[k] != t) allowed.push_back(k);
                } else {
                    for (int k = 0; k < inst.num_products(); ++k)
                        if (stock[inst.products[k].item] > 0 && seen[k] != t) allowed.push_back(k);
                }
                Assortment S;
                if (kind == BaselineKind::OfferAll) {
                    if (!allowed.empty()) S = {allowed.front()};
                } else {
                    S = greedy_assortment(inst, j, allowed);
                }
                if (S.empty()) break;
                for (int k : S) seen[k] = t;
                ty.choice.probs(S, probs);
                int pick = categorical_pick(probs, uniform01(rng));
                int bought = pick >= 0 ? S[pick] : -1;
                if (record) rec.stages.push_back({S, S, bought});
                if (bought >= 0) {
                    --stock[inst.products[bought].item];
                    revenue += ty.revenue[bought];
                    rec.revenue += ty.revenue[bought];
                    break;
                }
                if (ty.random_patience() && bernoulli(rng, ty.leave_prob)) break;
            }
        }
        if (record) tr.steps.push_back(std::move(rec));
    }
    tr.revenue = revenue;
    tr.final_inventory = stock;
    if (out) {
        double sold = 0.0, total = 0.0;
        for (int i = 0; i < inst.n(); ++i) {
            sold += tr.initial_inventory[i] - stock[i];
            total += tr.initial_inventory[i];
        }
        out->revenue = revenue;
        out->counters = {total > 0 ? sold / total : 0.0, total > 0 ? (sold / total) * (sold / total) : 0.0};
    }
    return tr;
}

namespace {

MonteCarloEstimate from_sums(double s, double s2, std::uint64_t n) {
    MonteCarloEstimate e;
    e.n = n;
    if (n == 0) return e;
    e.mean = s / double(n);
    if (n > 1) e.variance = std::max(0.0, (s2 - double(n) * e.mean * e.mean) / double(n - 1));
    return e;
}

}  // namespace

BaselineEvaluation evaluate_baseline(const Instance& inst, BaselineKind kind, std::uint64_t replicas,
                                     std::uint64_t seed, ExecMode mode) {
    auto fn = [&](std::uint64_t r) {
        ReplicaOutcome o;
        simulate_baseline(inst, kind, seed, r, false, &o);
        return o;
    };
    ReplicaSummary sum = run_replicas(replicas, fn, mode);
    sum.counters.resize(2, 0.0);
    BaselineEvaluation ev;
    ev.replicas = replicas;
    ev.revenue = MonteCarloEstimate::from(sum.revenue);
    ev.sold_fraction = from_sums(sum.counters[0], sum.counters[1], replicas);
    return ev;
}

MonteCarloEstimate hardness_sold_fraction(int n, std::uint64_t replicas, std::uint64_t seed, ExecMode mode) {
    if (n < 1) throw std::invalid_argument("hardness: n must be positive");
    const double p = 1.0 / n;
    auto fn = [&](std::uint64_t r) {
        Rng rng = make_rng(seed, r);
        int stock = n;
        // Every step has an arrival (q sums to 1); patience n covers the stock.
        for (int t = 0; t < n && stock > 0; ++t)
            if (uniform01(rng) < -std::expm1(stock * std::log1p(-p))) --stock;
        double f = double(n - stock) / n;
        ReplicaOutcome o;
        o.revenue = f;
        return o;
    };
    return MonteCarloEstimate::from(run_replicas(replicas, fn, mode).revenue);
}

}  // namespace mcao
