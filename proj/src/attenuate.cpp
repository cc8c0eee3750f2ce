#include "mcao/attenuate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcao/blackbox.hpp"

namespace mcao {

AttenPlan AttenPlan::from(const McdlpSolution& sol) {
    AttenPlan p;
    p.entries = sol.plan;
    return p;
}

bool attenuation_hypothesis(const Instance& inst, const AttenPlan& plan, int j) {
    const auto& ty = inst.types[j];
    const auto& E = plan.entries[j];
    if (ty.patience >= int(E.size())) return true;
    double s = 0.0;
    for (const auto& e : E) s += ty.choice.mass(e.set);
    return s <= 1.0 + 1e-9;
}

namespace {

constexpr std::uint64_t kCounterfactualSalt = 0xc0ffee;

struct Coin {
    int entry;
    Assortment members;        // surviving products of the entry's set
    std::vector<int> pos;      // their positions in the original set
};

// Coins for type j given current availability; returns the CoinSet view too.
void build_coins(const Instance& inst, const AttenPlan& plan, int j, const std::vector<char>& avail,
                 std::vector<Coin>& coins, CoinSet& cs) {
    coins.clear();
    cs.p.clear();
    cs.x.clear();
    const auto& ty = inst.types[j];
    const auto& E = plan.entries[j];
    for (int e = 0; e < int(E.size()); ++e) {
        Coin c;
        c.entry = e;
        for (int u = 0; u < int(E[e].set.size()); ++u) {
            int k = E[e].set[u];
            if (avail[inst.products[k].item]) {
                c.members.push_back(k);
                c.pos.push_back(u);
            }
        }
        if (c.members.empty()) continue;
        cs.p.push_back(ty.choice.mass(c.members));
        cs.x.push_back(std::min(1.0, E[e].x));
        coins.push_back(std::move(c));
    }
    cs.patience = ty.patience;
    cs.tag = classify(cs.p, ty.patience);
}

// Everything one step needs; `state` supplies factors for steps < its size.
struct Stepper {
    const Instance& inst;
    const AttenPlan& plan;
    const AttenuationState& st;
    std::vector<Coin> coins;
    CoinSet cs;
    std::vector<double> probs;

    // Real step t: draw the type, run the black-box, apply edge attenuation,
    // resolve the purchase. Vertex attenuation is separate.
    void serve(int t, std::vector<char>& avail, Rng& rng, double& revenue, StepRecord* rec,
               std::vector<double>* accepts) {
        int j = draw_type(inst, t, rng);
        if (rec) {
            rec->t = t;
            rec->type = j;
            for (int i = 0; i < inst.n(); ++i)
                if (avail[i]) rec->available.push_back(i);
        }
        if (j < 0) return;
        build_coins(inst, plan, j, avail, coins, cs);
        if (coins.empty()) return;
        FlipPlan fp = plan_flips(cs, rng);
        const auto& ty = inst.types[j];
        int flips = 0;
        for (int c : fp.order) {
            if (flips >= cs.patience) break;
            ++flips;
            const Coin& coin = coins[c];
            // One draw per flip shows member u iff d < a_u: marginals stay a_u
            // and equal factors keep the set whole, so MNL substitution does
            // not inflate per-item purchase rates.
            Assortment shown;
            const double d = uniform01(rng);
            for (std::size_t u = 0; u < coin.members.size(); ++u) {
                double a = st.edge[t][st.flat(j, coin.entry, coin.pos[u])];
                if (d < a) shown.push_back(coin.members[u]);
            }
            // One uniform drives both the black-box flip (over the intended
            // set) and the real choice (over the shown set); nested masses
            // make a real purchase imply heads.
            double u = uniform01(rng);
            bool heads = u < cs.p[c];
            int bought = -1;
            if (!shown.empty()) {
                double mshown = ty.choice.mass(shown);
                if (u < mshown) {
                    ty.choice.probs(shown, probs);
                    double v = uniform01(rng) * mshown;
                    int pick = categorical_pick(probs, v);
                    bought = shown[pick < 0 ? int(shown.size()) - 1 : pick];
                }
            }
            if (rec) rec->stages.push_back({coin.members, shown, bought});
            if (bought >= 0) {
                avail[inst.products[bought].item] = 0;
                double r = ty.revenue[bought];
                revenue += r;
                if (rec) rec->revenue += r;
                if (accepts) {
                    int u2 = int(std::find(coin.members.begin(), coin.members.end(), bought) - coin.members.begin());
                    (*accepts)[std::size_t(t) * st.flat_size + st.flat(j, coin.entry, coin.pos[u2])] += 1.0;
                }
                break;
            }
            if (heads) break;
        }
    }

    void retire(int t, std::vector<char>& avail, Rng& rng) {
        for (int i = 0; i < inst.n(); ++i)
            if (avail[i] && !(uniform01(rng) < st.vertex[t][i])) avail[i] = 0;
    }

    // Black-box alone for type j at step t; records intended offers.
    void counterfactual(int j, const std::vector<char>& avail, Rng& rng, std::vector<double>& offered) {
        build_coins(inst, plan, j, avail, coins, cs);
        if (coins.empty()) return;
        FlipPlan fp = plan_flips(cs, rng);
        int flips = 0;
        for (int c : fp.order) {
            if (flips >= cs.patience) break;
            ++flips;
            for (int p : coins[c].pos) offered[st.flat(j, coins[c].entry, p)] += 1.0;
            if (uniform01(rng) < cs.p[c]) break;
        }
    }
};

std::vector<char> initial_avail(const Instance& inst) {
    std::vector<char> a(inst.n());
    for (int i = 0; i < inst.n(); ++i) a[i] = inst.items[i].inventory > 0;
    return a;
}

void check_plan(const Instance& inst, const AttenPlan& plan) {
    if (int(plan.entries.size()) != inst.m()) throw std::invalid_argument("attenuation: plan has the wrong type count");
    std::vector<double> load(inst.n(), 0.0);
    for (int j = 0; j < inst.m(); ++j) {
        const auto& ty = inst.types[j];
        double mass = 0.0, sx = 0.0;
        for (const auto& e : plan.entries[j]) {
            if (e.x < -1e-9 || e.x > 1.0 + 1e-7) throw std::invalid_argument("attenuation: plan weight outside [0,1]");
            if (!inst.family_contains(e.set)) throw std::invalid_argument("attenuation: plan set outside the family");
            std::vector<double> p;
            ty.choice.probs(e.set, p);
            for (std::size_t u = 0; u < p.size(); ++u) {
                mass += p[u] * e.x;
                load[inst.products[e.set[u]].item] += inst.total_arrival(j) * p[u] * e.x;
            }
            sx += e.x;
        }
        if (mass > 1.0 + 1e-6 || sx > ty.patience + 1e-6)
            throw std::invalid_argument("attenuation: LP plan infeasible for type " + std::to_string(j));
    }
    for (int i = 0; i < inst.n(); ++i)
        if (load[i] > inst.items[i].inventory + 1e-6)
            throw std::invalid_argument("attenuation: LP plan oversells item " + std::to_string(i));
}

}  // namespace

AttenuationState init_attenuation(const Instance& inst, const AttenPlan& plan, const AttenuationOptions& opt) {
    if (opt.budget == 0) throw std::invalid_argument("attenuation: Monte Carlo budget must be positive");
    for (const auto& it : inst.items)
        if (it.inventory > 1) throw std::invalid_argument("attenuation: unit inventories required; split_inventory first");
    for (const auto& ty : inst.types)
        if (ty.random_patience()) throw std::invalid_argument("attenuation: deterministic patience required");
    check_plan(inst, plan);
    AttenuationState st;
    st.gamma = gamma_schedule(inst.T);
    st.budget = opt.budget;
    st.offset.resize(inst.m());
    for (int j = 0; j < inst.m(); ++j) {
        for (const auto& e : plan.entries[j]) {
            st.offset[j].push_back(st.flat_size);
            st.flat_size += int(e.set.size());
        }
        if (!attenuation_hypothesis(inst, plan, j)) {
            st.guarantee = false;
            st.diagnostics.push_back("type " + std::to_string(j) + " violates the black-box hypothesis; no guarantee");
            if (!opt.warn_only)
                throw std::invalid_argument("attenuation: hypothesis violated for type " + std::to_string(j));
        }
    }
    return st;
}

StepEstimates estimate_probabilities(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                     int t, std::size_t budget, std::uint64_t seed, ExecMode mode) {
    if (budget == 0) throw std::invalid_argument("estimate_probabilities: budget must be positive");
    if (int(state.edge.size()) < t || int(state.vertex.size()) < t)
        throw std::invalid_argument("estimate_probabilities: factors for earlier steps are missing");
    const int n = inst.n();
    const std::uint64_t batch = mix_seed(seed, std::uint64_t(t));
    const std::size_t F = std::size_t(state.flat_size);
    auto fn = [&](std::uint64_t r) {
        Stepper sp{inst, plan, state, {}, {}, {}};
        Rng rng = make_rng(batch, r);
        std::vector<char> avail = initial_avail(inst);
        double rev = 0.0;
        for (int s = 0; s < t; ++s) {
            sp.serve(s, avail, rng, rev, nullptr, nullptr);
            sp.retire(s, avail, rng);
        }
        ReplicaOutcome o;
        o.counters.assign(std::size_t(n) + F, 0.0);
        for (int i = 0; i < n; ++i) o.counters[i] = avail[i];
        Rng cf = make_rng(batch ^ kCounterfactualSalt, r);
        std::vector<double> offered(F, 0.0);
        for (int j = 0; j < inst.m(); ++j) sp.counterfactual(j, avail, cf, offered);
        for (std::size_t f = 0; f < F; ++f) o.counters[n + f] = offered[f];
        return o;
    };
    ReplicaSummary sum = run_replicas(budget, fn, mode);
    sum.counters.resize(std::size_t(n) + F, 0.0);
    StepEstimates est;
    const double B = double(budget);
    est.avail.resize(n);
    est.avail_se.resize(n);
    est.avail_count.resize(n);
    for (int i = 0; i < n; ++i) {
        est.avail_count[i] = sum.counters[i];
        est.avail[i] = sum.counters[i] / B;
        est.avail_se[i] = t == 0 ? 0.0 : bernoulli_se(sum.counters[i], B);
    }
    est.offer.assign(F, 0.0);
    est.offer_se.assign(F, 0.0);
    for (int j = 0; j < inst.m(); ++j)
        for (int e = 0; e < int(plan.entries[j].size()); ++e)
            for (int u = 0; u < int(plan.entries[j][e].set.size()); ++u) {
                int f = state.flat(j, e, u);
                int item = inst.products[plan.entries[j][e].set[u]].item;
                double den = est.avail_count[item];
                if (den <= 0.0) {
                    est.offer[f] = -1.0;  // unestimable
                    continue;
                }
                est.offer[f] = sum.counters[n + f] / den;
                est.offer_se[f] = bernoulli_se(sum.counters[n + f], den);
            }
    return est;
}

namespace {

// Pre-retirement availability at t+1: the same replicas as the estimator
// batch for t, now served at step t with the freshly fixed edge factors.
void estimate_prevertex(const Instance& inst, const AttenPlan& plan, const AttenuationState& state, int t,
                        std::size_t budget, std::uint64_t seed, ExecMode mode, std::vector<double>& mean,
                        std::vector<double>& se) {
    const int n = inst.n();
    const std::uint64_t batch = mix_seed(seed, std::uint64_t(t));
    auto fn = [&](std::uint64_t r) {
        Stepper sp{inst, plan, state, {}, {}, {}};
        Rng rng = make_rng(batch, r);
        std::vector<char> avail = initial_avail(inst);
        double rev = 0.0;
        for (int s = 0; s < t; ++s) {
            sp.serve(s, avail, rng, rev, nullptr, nullptr);
            sp.retire(s, avail, rng);
        }
        sp.serve(t, avail, rng, rev, nullptr, nullptr);
        ReplicaOutcome o;
        o.counters.assign(avail.begin(), avail.end());
        return o;
    };
    ReplicaSummary sum = run_replicas(budget, fn, mode);
    sum.counters.resize(n, 0.0);
    mean.resize(n);
    se.resize(n);
    for (int i = 0; i < n; ++i) {
        mean[i] = sum.counters[i] / double(budget);
        se[i] = bernoulli_se(sum.counters[i], double(budget));
    }
}

}  // namespace

AttenuationState compute_attenuation(const Instance& inst, const AttenPlan& plan, const AttenuationOptions& opt,
                                     std::uint64_t seed) {
    AttenuationState st = init_attenuation(inst, plan, opt);
    const int n = inst.n();
    for (int t = 0; t < inst.T; ++t) {
        StepEstimates est = estimate_probabilities(inst, plan, st, t, opt.budget, seed, opt.mode);
        const double gt = st.gamma.gamma[t];
        const double scale = -std::expm1(-gt) / gt;
        std::vector<double> edge(st.flat_size, 1.0);
        for (int j = 0; j < inst.m(); ++j)
            for (int e = 0; e < int(plan.entries[j].size()); ++e)
                for (int u = 0; u < int(plan.entries[j][e].set.size()); ++u) {
                    int f = st.flat(j, e, u);
                    double target = scale * std::min(1.0, plan.entries[j][e].x);
                    double have = est.offer[f];
                    if (have < 0.0 || have == 0.0) {
                        if (have < 0.0) ++st.unestimable;
                        if (target > 0.0 && have == 0.0) ++st.edge_flags;
                        edge[f] = 1.0;
                        continue;
                    }
                    if (target > have + 2.0 * est.offer_se[f]) ++st.edge_flags;
                    edge[f] = std::clamp(target / have, 0.0, 1.0);
                }
        st.edge.push_back(std::move(edge));
        st.estimates.push_back(std::move(est));

        std::vector<double> pre, pre_se;
        estimate_prevertex(inst, plan, st, t, opt.budget, seed, opt.mode, pre, pre_se);
        const double g_next = st.gamma.gamma[t + 1];
        std::vector<double> vertex(n, 1.0);
        for (int i = 0; i < n; ++i) {
            if (pre[i] <= 0.0) {
                ++st.unestimable;
                continue;
            }
            if (g_next > pre[i] + 2.0 * pre_se[i]) ++st.vertex_flags;
            vertex[i] = std::clamp(g_next / pre[i], 0.0, 1.0);
        }
        st.vertex.push_back(std::move(vertex));
        st.prevertex.push_back(std::move(pre));
        st.prevertex_se.push_back(std::move(pre_se));
    }
    if (st.edge_flags) st.diagnostics.push_back(std::to_string(st.edge_flags) + " edge targets above their estimates");
    if (st.vertex_flags)
        st.diagnostics.push_back(std::to_string(st.vertex_flags) + " availability targets above their estimates");
    return st;
}

PolicyTrace simulate_attenuated(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                std::uint64_t seed, std::uint64_t replica, const SimOptions& sopt,
                                ReplicaOutcome* out) {
    if (int(state.edge.size()) < inst.T) throw std::invalid_argument("simulate_attenuated: factors incomplete");
    const int n = inst.n();
    Stepper sp{inst, plan, state, {}, {}, {}};
    Rng rng = make_rng(seed, replica);
    std::vector<char> avail = initial_avail(inst);
    PolicyTrace tr;
    tr.replica = replica;
    for (const auto& it : inst.items) tr.initial_inventory.push_back(it.inventory);
    std::vector<double>* acc = nullptr;
    std::vector<double> accepts;
    if (out) {
        out->counters.assign(std::size_t(inst.T + 1) * n, 0.0);
        if (sopt.count_accepts) {
            accepts.assign(std::size_t(inst.T) * state.flat_size, 0.0);
            acc = &accepts;
        }
    }
    std::vector<int> stock = tr.initial_inventory;
    double revenue = 0.0;
    for (int t = 0; t < inst.T; ++t) {
        if (out)
            for (int i = 0; i < n; ++i) out->counters[std::size_t(t) * n + i] = avail[i];
        StepRecord rec;
        std::vector<char> before = avail;
        sp.serve(t, avail, rng, revenue, sopt.record ? &rec : nullptr, acc);
        for (int i = 0; i < n; ++i)
            if (before[i] && !avail[i]) --stock[i];
        sp.retire(t, avail, rng);
        if (sopt.record) tr.steps.push_back(std::move(rec));
    }
    if (out) {
        for (int i = 0; i < n; ++i) out->counters[std::size_t(inst.T) * n + i] = avail[i];
        out->counters.insert(out->counters.end(), accepts.begin(), accepts.end());
        out->revenue = revenue;
    }
    tr.revenue = revenue;
    tr.final_inventory = stock;
    if (!state.guarantee) tr.flags.push_back("no guarantee");
    return tr;
}

AttenEvaluation evaluate_attenuated(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                    std::uint64_t replicas, std::uint64_t seed, bool count_accepts, ExecMode mode) {
    SimOptions so;
    so.count_accepts = count_accepts;
    auto fn = [&](std::uint64_t r) {
        ReplicaOutcome o;
        simulate_attenuated(inst, plan, state, seed, r, so, &o);
        return o;
    };
    ReplicaSummary sum = run_replicas(replicas, fn, mode);
    const int n = inst.n();
    AttenEvaluation ev;
    ev.replicas = replicas;
    ev.revenue = MonteCarloEstimate::from(sum.revenue);
    sum.counters.resize(std::size_t(inst.T + 1) * n + (count_accepts ? std::size_t(inst.T) * state.flat_size : 0), 0.0);
    ev.avail.assign(inst.T + 1, std::vector<double>(n));
    for (int t = 0; t <= inst.T; ++t)
        for (int i = 0; i < n; ++i) ev.avail[t][i] = sum.counters[std::size_t(t) * n + i] / double(replicas);
    if (count_accepts) {
        ev.accept.assign(inst.T, std::vector<double>(state.flat_size));
        std::size_t base = std::size_t(inst.T + 1) * n;
        for (int t = 0; t < inst.T; ++t)
            for (int f = 0; f < state.flat_size; ++f)
                ev.accept[t][f] = sum.counters[base + std::size_t(t) * state.flat_size + f] / double(replicas);
    }
    return ev;
}

PolicyTrace run_algorithm1(const Instance& inst, const McdlpSolution& x, std::size_t budget, std::uint64_t seed) {
    if (!inst.matching && inst.family.k > 1) throw std::invalid_argument("run_algorithm1: matching instance required");
    AttenPlan plan = AttenPlan::from(x);
    AttenuationOptions opt;
    opt.budget = budget;
    AttenuationState st = compute_attenuation(inst, plan, opt, seed);
    SimOptions so;
    so.record = true;
    return simulate_attenuated(inst, plan, st, mix_seed(seed, 0xe7a1), 0, so);
}

PolicyTrace run_algorithm6(const Instance& inst, const McdlpSolution& x, std::size_t budget, std::uint64_t seed) {
    if (!inst.repeated_offers_allowed) throw std::invalid_argument("run_algorithm6: repeated offers must be allowed");
    AttenPlan plan = AttenPlan::from(x);
    AttenuationOptions opt;
    opt.budget = budget;
    AttenuationState st = compute_attenuation(inst, plan, opt, seed);
    SimOptions so;
    so.record = true;
    return simulate_attenuated(inst, plan, st, mix_seed(seed, 0xe7a1), 0, so);
}

}  // namespace mcao
