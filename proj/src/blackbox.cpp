#include "mcao/blackbox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mcao/rounding.hpp"

namespace mcao {

const char* case_name(CoinCase c) {
    switch (c) {
        case CoinCase::SmallProbs: return "small-probs";
        case CoinCase::FullPatience: return "full-patience";
        case CoinCase::NoGuarantee: return "no-guarantee";
    }
    return "?";
}

CoinCase classify(const std::vector<double>& p, int patience) {
    if (patience >= int(p.size())) return CoinCase::FullPatience;
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    if (s <= 1.0 + 1e-9) return CoinCase::SmallProbs;
    return CoinCase::NoGuarantee;
}

KeyRule key_rule(CoinCase c) {
    return c == CoinCase::SmallProbs ? KeyRule::SmallProbs : KeyRule::FullPatience;
}

double w_value(int coin, const CoinSet& coins, KeyRule rule) {
    double others = 0.0;
    for (std::size_t k = 0; k < coins.size(); ++k)
        if (int(k) != coin) others += coins.p[k] * coins.x[k];
    double sub = rule == KeyRule::SmallProbs ? coins.p[coin] : coins.p[coin] * coins.x[coin];
    if (sub >= 1.0) return 1.0;
    return others / (1.0 - sub);
}

double w_value(int coin, const CoinSet& coins) { return w_value(coin, coins, key_rule(coins.tag)); }

FlipPlan plan_flips(const CoinSet& coins, KeyRule rule, Rng& rng) {
    FlipPlan plan;
    std::vector<int> Z = gkps_round(coins.x, rng);
    plan.rounded.assign(coins.size(), 0);
    std::vector<std::pair<double, int>> keyed;
    for (std::size_t k = 0; k < coins.size(); ++k) {
        if (!Z[k]) continue;
        plan.rounded[k] = 1;
        double y = uniform01(rng);
        double denom = 1.0 - (rule == KeyRule::SmallProbs ? coins.p[k] : coins.p[k] * coins.x[k]);
        // A degenerate denominator means the coin is certain: it goes first.
        double key = denom <= 0.0 ? 0.0 : y / denom;
        keyed.push_back({key, int(k)});
    }
    std::sort(keyed.begin(), keyed.end());
    for (auto& kv : keyed) plan.order.push_back(kv.second);
    return plan;
}

FlipPlan plan_flips(const CoinSet& coins, Rng& rng) { return plan_flips(coins, key_rule(coins.tag), rng); }

FlipOutcome run_blackbox(const CoinSet& coins, KeyRule rule, Rng& rng) {
    FlipPlan plan = plan_flips(coins, rule, rng);
    FlipOutcome out;
    out.rounded = plan.rounded;
    out.flipped.assign(coins.size(), 0);
    out.heads.assign(coins.size(), 0);
    for (int k : plan.order) {
        if (int(out.order.size()) >= coins.patience) break;
        out.order.push_back(k);
        out.flipped[k] = 1;
        if (uniform01(rng) < coins.p[k]) {
            out.heads[k] = 1;
            out.winner = k;
            break;
        }
    }
    return out;
}

FlipOutcome run_blackbox(const CoinSet& coins, Rng& rng) { return run_blackbox(coins, key_rule(coins.tag), rng); }

FlipOutcome run_blackbox(const CoinSet& coins, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return run_blackbox(coins, rng);
}

CoinSet as_coinset(const AssortCoinSet& a, const ChoiceModel& choice) {
    CoinSet c;
    c.x = a.x;
    c.patience = a.patience;
    c.tag = a.tag;
    for (const auto& S : a.sets) c.p.push_back(choice.mass(S));
    return c;
}

int categorical_pick(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return int(k);
    }
    return -1;
}

FlipOutcome run_blackbox_assort(const AssortCoinSet& a, const ChoiceModel& choice, Rng& rng) {
    if (a.sets.size() != a.x.size()) throw std::invalid_argument("run_blackbox_assort: sets and weights differ in size");
    CoinSet coins = as_coinset(a, choice);
    double load = 0.0, sx = 0.0;
    for (std::size_t k = 0; k < coins.size(); ++k) {
        load += coins.p[k] * coins.x[k];
        sx += coins.x[k];
    }
    if (load > 1.0 + 1e-9 || sx > a.patience + 1e-9)
        throw std::invalid_argument("run_blackbox_assort: weights violate sum p x <= 1 or sum x <= patience");
    FlipPlan plan = plan_flips(coins, rng);
    FlipOutcome out;
    out.rounded = plan.rounded;
    out.flipped.assign(coins.size(), 0);
    out.heads.assign(coins.size(), 0);
    std::vector<double> probs;
    for (int k : plan.order) {
        if (int(out.order.size()) >= a.patience) break;
        out.order.push_back(k);
        out.flipped[k] = 1;
        choice.probs(a.sets[k], probs);
        int pos = categorical_pick(probs, uniform01(rng));
        if (pos >= 0) {
            out.heads[k] = 1;
            out.winner = k;
            out.product = a.sets[k][pos];
            break;
        }
    }
    return out;
}

FlipOutcome run_blackbox_assort(const AssortCoinSet& a, const ChoiceModel& choice, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return run_blackbox_assort(a, choice, rng);
}

double f_value(double z) {
    if (!(z >= -1e-12 && z <= 1.0 + 1e-12)) throw std::domain_error("f: argument outside [0,1]");
    z = std::clamp(z, 0.0, 1.0);
    if (z < 1e-8) return 1.0 - z / 2.0;
    return -std::expm1(-z) / z;
}

double f_derivative(double z) {
    if (!(z >= -1e-12 && z <= 1.0 + 1e-12)) throw std::domain_error("f': argument outside [0,1]");
    z = std::clamp(z, 0.0, 1.0);
    if (z < 1e-4) return -0.5 + z / 3.0;
    return (std::exp(-z) * (z + 1.0) - 1.0) / (z * z);
}

}  // namespace mcao
