#include "mcao/norepeat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcao/blackbox.hpp"

namespace mcao {

const char* norepeat_name(NoRepeatVariant v) {
    switch (v) {
        case NoRepeatVariant::FirstArrival: return "norepeat";
        case NoRepeatVariant::Modified: return "norepeat-homog";
        case NoRepeatVariant::RandomPatience: return "norepeat-randpatience";
    }
    return "?";
}

double alpha_star() { return (3.0 + std::sqrt(17.0)) / 2.0; }

double norepeat_ratio_bound(double a) {
    return (1.0 - std::exp(-1.0)) / a * (1.0 - 3.0 / (2.0 * a) - 2.0 / (3.0 * a * a));
}

double imatch_bound(double a) { return 1.0 / (2.0 * a); }
double timeout_cmatch_bound(double a) { return 1.0 / (2.0 * a) + 2.0 / (3.0 * a * a); }
double modified_offer_factor(double a) { return (1.0 - 3.0 / (2.0 * a)) / a; }
double modified_item_bound(double sum_p, double a) { return -std::expm1(-modified_offer_factor(a) * sum_p); }
double modified_ratio_bound(double a) { return -std::expm1(-modified_offer_factor(a)); }

NoRepeatPlan NoRepeatPlan::from(const Instance& inst, const McdlpSolution& sol) {
    NoRepeatPlan p;
    p.entries = sol.plan;
    p.entries.resize(inst.m());
    p.offset.resize(inst.m());
    p.entry_id.resize(inst.m());
    for (int j = 0; j < inst.m(); ++j)
        for (const auto& e : p.entries[j]) {
            p.offset[j].push_back(p.member_count);
            p.entry_id[j].push_back(p.entry_count++);
            p.member_count += int(e.set.size());
        }
    return p;
}

double effective_alpha(const NoRepeatOptions& opt) {
    if (opt.alpha > 0.0) return opt.alpha;
    return opt.variant == NoRepeatVariant::Modified ? 3.0 : alpha_star();
}

void check_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt) {
    if (opt.alpha < 0.0 || !std::isfinite(opt.alpha)) throw std::invalid_argument("norepeat: alpha must be positive");
    if (int(plan.entries.size()) != inst.m()) throw std::invalid_argument("norepeat: plan has the wrong number of types");
    for (int j = 0; j < inst.m(); ++j)
        for (const auto& e : plan.entries[j]) {
            if (e.set.empty() || !inst.family_contains(e.set))
                throw std::invalid_argument("norepeat: plan assortment outside the family");
            for (int k : e.set)
                if (k < 0 || k >= inst.num_products()) throw std::invalid_argument("norepeat: plan product out of range");
            if (!(e.x >= 0.0)) throw std::invalid_argument("norepeat: negative plan weight");
        }
    if (!opt.enforce_preconditions) return;
    switch (opt.variant) {
        case NoRepeatVariant::FirstArrival:
            for (int j = 0; j < inst.m(); ++j) {
                if (inst.types[j].random_patience())
                    throw std::invalid_argument("norepeat: geometric patience needs the random-patience variant");
                if (std::abs(inst.total_arrival(j) - 1.0) > 1e-9)
                    throw std::invalid_argument("norepeat: arrivals must be integralized (T q_j = 1)");
            }
            break;
        case NoRepeatVariant::RandomPatience:
            for (int j = 0; j < inst.m(); ++j) {
                if (!inst.types[j].random_patience())
                    throw std::invalid_argument("norepeat: deterministic patience rejected by the random-patience variant");
                if (std::abs(inst.total_arrival(j) - 1.0) > 1e-9)
                    throw std::invalid_argument("norepeat: arrivals must be integralized (T q_j = 1)");
            }
            break;
        case NoRepeatVariant::Modified:
            for (int k = 0; k < inst.num_products(); ++k)
                for (int j = 1; j < inst.m(); ++j)
                    if (inst.types[j].revenue[k] != inst.types[0].revenue[k])
                        throw std::invalid_argument("norepeat: heterogeneous revenues rejected by the modified algorithm");
            break;
    }
}

std::vector<int> norepeat_order(int size, Rng& rng) {
    std::vector<int> order(size);
    for (int k = 0; k < size; ++k) order[k] = k;
    for (int k = size - 1; k > 0; --k) {
        std::uniform_int_distribution<int> d(0, k);
        std::swap(order[k], order[d(rng)]);
    }
    return order;
}

namespace {

struct Layout {
    std::size_t type, imatch, seen, tc, sold, offers, offers_sq, served, clamp, size;
    Layout(const Instance& inst, const NoRepeatPlan& plan) {
        const std::size_t n = inst.n(), m = inst.m();
        type = 0;
        imatch = type + m;
        seen = imatch + m * n;
        tc = seen + plan.member_count;
        sold = tc + plan.entry_count;
        offers = sold + n;
        offers_sq = offers + 1;
        served = offers_sq + 1;
        clamp = served + 1;
        size = clamp + 1;
    }
};

}  // namespace

PolicyTrace simulate_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt,
                              std::uint64_t seed, std::uint64_t replica, bool record, ReplicaOutcome* out) {
    const double alpha = effective_alpha(opt);
    const bool gated = opt.variant != NoRepeatVariant::Modified;
    const int n = inst.n(), m = inst.m();
    Layout L(inst, plan);
    std::vector<double> cnt;
    if (out) cnt.assign(L.size, 0.0);

    Rng rng = make_rng(seed, replica);
    PolicyTrace tr;
    tr.replica = replica;
    for (const auto& it : inst.items) tr.initial_inventory.push_back(it.inventory);
    std::vector<int> stock = tr.initial_inventory;
    std::vector<char> arrived(m, 0);
    // seen[k] == stamp marks product k as shown to the current customer.
    std::vector<int> seen(inst.num_products(), -1);
    std::vector<double> probs, orig;
    double revenue = 0.0, clamped = 0.0;

    for (int t = 0; t < inst.T; ++t) {
        StepRecord rec;
        int j = draw_type(inst, t, rng);
        if (record) {
            rec.t = t;
            rec.type = j;
            for (int i = 0; i < n; ++i)
                if (stock[i] > 0) rec.available.push_back(i);
        }
        const bool first = j >= 0 && !arrived[j];
        if (j >= 0) arrived[j] = 1;
        if (j < 0 || (gated && !first)) {
            if (record) tr.steps.push_back(std::move(rec));
            continue;
        }
        const auto& ty = inst.types[j];
        const auto& E = plan.entries[j];
        if (out && first) {
            cnt[L.type + j] += 1.0;
            for (int i = 0; i < n; ++i)
                if (stock[i] <= 0) cnt[L.imatch + std::size_t(j) * n + i] += 1.0;
        }
        std::vector<int> order = norepeat_order(int(E.size()), rng);
        int offers = 0;
        bool stopped = false;
        for (int e : order) {
            const auto& S = E[e].set;
            if (out && first) {
                // Events at S's position in the order; walked to the end.
                if (stopped) cnt[L.tc + plan.entry_id[j][e]] += 1.0;
                for (std::size_t u = 0; u < S.size(); ++u)
                    if (seen[S[u]] == t) cnt[L.seen + plan.offset[j][e] + u] += 1.0;
            }
            if (stopped) continue;
            double pin = E[e].x / alpha;
            if (pin > 1.0) {
                pin = 1.0;
                clamped += 1.0;
            }
            if (!(uniform01(rng) < pin)) continue;
            Assortment shown;
            for (int k : S)
                if (stock[inst.products[k].item] > 0 && seen[k] != t) shown.push_back(k);
            // A fully stripped assortment is no offer and costs no patience.
            if (shown.empty()) continue;
            ++offers;
            for (int k : shown) seen[k] = t;
            ty.choice.probs(shown, probs);
            if (opt.check_substitutability) {
                ty.choice.probs(S, orig);
                for (std::size_t u = 0, v = 0; u < S.size(); ++u) {
                    if (v < shown.size() && shown[v] == S[u]) {
                        if (probs[v] < orig[u] - 1e-12)
                            throw std::logic_error("norepeat: stripping lowered a purchase probability");
                        ++v;
                    }
                }
            }
            int pick = categorical_pick(probs, uniform01(rng));
            int bought = pick >= 0 ? shown[pick] : -1;
            if (record) rec.stages.push_back({shown, shown, bought});
            if (bought >= 0) {
                int item = inst.products[bought].item;
                --stock[item];
                revenue += ty.revenue[bought];
                rec.revenue += ty.revenue[bought];
                stopped = true;
            } else if (ty.random_patience()) {
                stopped = bernoulli(rng, ty.leave_prob);
            } else {
                stopped = offers >= ty.patience;
            }
        }
        if (out) {
            cnt[L.offers] += offers;
            cnt[L.offers_sq] += double(offers) * offers;
            cnt[L.served] += 1.0;
        }
        if (record) tr.steps.push_back(std::move(rec));
    }
    tr.revenue = revenue;
    tr.final_inventory = stock;
    if (clamped > 0) tr.flags.push_back("inclusion probability clamped at 1 (alpha below 1)");
    if (out) {
        for (int i = 0; i < n; ++i) cnt[L.sold + i] = tr.initial_inventory[i] - stock[i] > 0 ? 1.0 : 0.0;
        cnt[L.clamp] = clamped;
        out->revenue = revenue;
        out->counters = std::move(cnt);
    }
    return tr;
}

NoRepeatEvaluation evaluate_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt,
                                     std::uint64_t replicas, std::uint64_t seed, ExecMode mode) {
    check_norepeat(inst, plan, opt);
    auto fn = [&](std::uint64_t r) {
        ReplicaOutcome o;
        simulate_norepeat(inst, plan, opt, seed, r, false, &o);
        return o;
    };
    ReplicaSummary sum = run_replicas(replicas, fn, mode);
    Layout L(inst, plan);
    sum.counters.resize(L.size, 0.0);
    const auto& c = sum.counters;
    const int n = inst.n(), m = inst.m();
    const double R = double(replicas);

    NoRepeatEvaluation ev;
    ev.replicas = replicas;
    ev.alpha = effective_alpha(opt);
    ev.revenue = MonteCarloEstimate::from(sum.revenue);
    ev.type_freq.resize(m);
    ev.imatch.assign(m, std::vector<Freq>(n));
    ev.seen.resize(plan.member_count);
    ev.timeout_cmatch.resize(plan.entry_count);
    for (int j = 0; j < m; ++j) {
        double nj = c[L.type + j];
        ev.type_freq[j] = nj / R;
        for (int i = 0; i < n; ++i) ev.imatch[j][i] = {c[L.imatch + std::size_t(j) * n + i], nj};
        for (std::size_t e = 0; e < plan.entries[j].size(); ++e) {
            ev.timeout_cmatch[plan.entry_id[j][e]] = {c[L.tc + plan.entry_id[j][e]], nj};
            for (std::size_t u = 0; u < plan.entries[j][e].set.size(); ++u) {
                std::size_t f = plan.offset[j][e] + u;
                ev.seen[f] = {c[L.seen + f], nj};
            }
        }
    }
    ev.sold.resize(n);
    for (int i = 0; i < n; ++i) ev.sold[i] = {c[L.sold + i], R};
    double N = c[L.served];
    ev.offers_per_customer.n = std::uint64_t(N);
    if (N > 0) {
        ev.offers_per_customer.mean = c[L.offers] / N;
        if (N > 1)
            ev.offers_per_customer.variance =
                std::max(0.0, (c[L.offers_sq] - N * ev.offers_per_customer.mean * ev.offers_per_customer.mean) / (N - 1));
    }
    ev.clamped = c[L.clamp];
    return ev;
}

std::vector<double> item_purchase_mass(const Instance& inst, const NoRepeatPlan& plan) {
    std::vector<double> mass(inst.n(), 0.0), probs;
    for (int j = 0; j < inst.m(); ++j) {
        const double Q = inst.total_arrival(j);
        for (const auto& e : plan.entries[j]) {
            inst.types[j].choice.probs(e.set, probs);
            for (std::size_t u = 0; u < e.set.size(); ++u) mass[inst.products[e.set[u]].item] += Q * e.x * probs[u];
        }
    }
    return mass;
}

namespace {

PolicyTrace run_variant(const Instance& inst, const McdlpSolution& x, double alpha, std::uint64_t seed,
                        NoRepeatVariant v) {
    NoRepeatPlan plan = NoRepeatPlan::from(inst, x);
    NoRepeatOptions opt;
    opt.variant = v;
    opt.alpha = alpha;
    check_norepeat(inst, plan, opt);
    return simulate_norepeat(inst, plan, opt, seed, 0, true);
}

}  // namespace

PolicyTrace run_algorithm3(const Instance& inst, const McdlpSolution& x, double alpha, std::uint64_t seed) {
    return run_variant(inst, x, alpha, seed, NoRepeatVariant::FirstArrival);
}

PolicyTrace run_modified_algorithm3(const Instance& inst, const McdlpSolution& x, double alpha, std::uint64_t seed) {
    return run_variant(inst, x, alpha, seed, NoRepeatVariant::Modified);
}

PolicyTrace run_algorithm3_random_patience(const Instance& inst, const McdlpSolution& x, double alpha,
                                           std::uint64_t seed) {
    return run_variant(inst, x, alpha, seed, NoRepeatVariant::RandomPatience);
}

}  // namespace mcao
