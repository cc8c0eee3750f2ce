#pragma once

#include <cstdint>
#include <vector>

#include "mcao/model.hpp"
#include "mcao/rng.hpp"

namespace mcao {

// SmallProbs: sum p <= 1. FullPatience: patience >= |A|. NoGuarantee: neither
// holds; the procedure runs with the FullPatience key and certifies nothing.
enum class CoinCase { SmallProbs, FullPatience, NoGuarantee };

const char* case_name(CoinCase c);

struct CoinSet {
    std::vector<double> p;  // success probability (assortments: purchase mass)
    std::vector<double> x;  // fractional weights
    int patience = 1;
    CoinCase tag = CoinCase::FullPatience;

    std::size_t size() const { return p.size(); }
};

// FullPatience when patience covers every coin, else SmallProbs when the
// masses sum to at most 1, else NoGuarantee.
CoinCase classify(const std::vector<double>& p, int patience);

// Sort-key convention; NoGuarantee uses the FullPatience key.
enum class KeyRule { SmallProbs, FullPatience };
KeyRule key_rule(CoinCase c);

struct FlipOutcome {
    std::vector<int> order;   // flipped coins in flip order
    int winner = -1;          // first heads
    int product = -1;         // purchased product (assortment version)
    std::vector<char> rounded, flipped, heads;
};

double w_value(int coin, const CoinSet& coins);
double w_value(int coin, const CoinSet& coins, KeyRule rule);

// Rounded-up coins in flip order (all of them; the caller stops early).
struct FlipPlan {
    std::vector<int> order;
    std::vector<char> rounded;
};
FlipPlan plan_flips(const CoinSet& coins, Rng& rng);
FlipPlan plan_flips(const CoinSet& coins, KeyRule rule, Rng& rng);

FlipOutcome run_blackbox(const CoinSet& coins, Rng& rng);
FlipOutcome run_blackbox(const CoinSet& coins, KeyRule rule, Rng& rng);
FlipOutcome run_blackbox(const CoinSet& coins, std::uint64_t seed);

// Assortment version: coin k is assortment sets[k] with mass sum p(i, S); a
// flip is one categorical draw over S and the no-purchase option.
struct AssortCoinSet {
    std::vector<Assortment> sets;
    std::vector<double> x;
    int patience = 1;
    CoinCase tag = CoinCase::FullPatience;
};

CoinSet as_coinset(const AssortCoinSet& a, const ChoiceModel& choice);
FlipOutcome run_blackbox_assort(const AssortCoinSet& a, const ChoiceModel& choice, Rng& rng);
FlipOutcome run_blackbox_assort(const AssortCoinSet& a, const ChoiceModel& choice, std::uint64_t seed);

// Categorical draw over S and no-purchase using u in [0,1): returns the
// position in S of the chosen product, or -1.
int categorical_pick(const std::vector<double>& probs, double u);

// f(z) = (1 - e^{-z}) / z with f(0) = 1; z must lie in [0,1].
double f_value(double z);
double f_derivative(double z);

}  // namespace mcao
