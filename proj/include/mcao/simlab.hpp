#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"
#include "mcao/stats.hpp"
#include "mcao/trace.hpp"

namespace mcao {

// ---- baseline policies ----

enum class BaselineKind {
    Greedy,        // per stage, argmax sum r p over available unseen products
    Conservative,  // greedy over each item's highest-revenue product only
    OfferAll,      // singleton offers of every available item in index order
};

const char* baseline_name(BaselineKind k);

// Greedy choice for one stage: best assortment within the family cap over
// `allowed` products (sorted). Ties go to the lexicographically smallest set;
// returns the empty set when nothing has positive expected revenue.
Assortment greedy_assortment(const Instance& inst, int type, const std::vector<int>& allowed);

// Products a conservative policy may show to `type`: per item, the products
// whose revenue equals the item's maximum for that type.
std::vector<int> conservative_products(const Instance& inst, int type);

PolicyTrace simulate_baseline(const Instance& inst, BaselineKind kind, std::uint64_t seed, std::uint64_t replica,
                              bool record = false, ReplicaOutcome* out = nullptr);

struct BaselineEvaluation {
    MonteCarloEstimate revenue;
    MonteCarloEstimate sold_fraction;  // units sold / initial units
    std::uint64_t replicas = 0;
};

BaselineEvaluation evaluate_baseline(const Instance& inst, BaselineKind kind, std::uint64_t replicas,
                                     std::uint64_t seed, ExecMode mode = ExecMode::Parallel);

// ---- generators ----

// T = m = n, q = 1/n, patience n, unit revenues, p = 1/n, singleton family.
Instance gen_hardness_instance(int n);
double hardness_limit();  // 1 - ln(2 - 1/e)

// Offer-all on the hardness instance. All purchase probabilities are equal,
// so each customer is one Bernoulli with 1 - (1 - p)^{min(patience, stock)}.
MonteCarloEstimate hardness_sold_fraction(int n, std::uint64_t replicas, std::uint64_t seed,
                                          ExecMode mode = ExecMode::Parallel);

// Single customer, M bases pairwise sharing one item, C(M,2) unit items,
// patience M/2, unit prices, p = 2/(M(M-1)) per shown item. The family is the
// downward closure of the bases when M <= kGapClosureLimitM, else the bases only
// (gap_lp_opt then prices the closure with an exact oracle).
inline constexpr int kGapClosureLimitM = 8;
Instance gen_gap_instance(int M);
std::vector<Assortment> gap_bases(int M);
// 1 - exp(-3M^2/(4M(M-1))) + 1/M
double gap_sale_bound(int M);
// Sale probability of offering M/2 bases in turn with seen items stripped.
double gap_greedy_sale_prob(int M);

struct GapLp {
    double opt = 0.0;
    int columns = 0, rounds = 0;
    double max_reduced_cost = 0.0;  // over the whole closure at the optimum
};
// MCDLP-NRS over the downward closure by column generation with an exact
// closure oracle (constant choice probabilities make the best subset of a
// base its positive-margin items).
GapLp gap_lp_opt(int M);

// Room categories and fares of the hotel template.
struct HotelTemplate {
    std::vector<std::string> rooms;
    std::vector<double> low_fare, high_fare, share;  // share sums to 1
    int types = 40;
    // Per type and product (room r at 2r low, 2r+1 high): raw MNL weights
    // before the no-purchase shift.
    std::vector<std::vector<double>> weights;
};

HotelTemplate gen_hotel_like(std::uint64_t seed, int types = 40);

struct HotelCell {
    double loading_factor = 1.0;
    int patience = 1;
    int cap = 4;
    double scale_factor = 1.0;
};

// Instance for one sweep cell: T = m, q = 1/m, inventory T / LF split by
// shares (largest remainder), per-type Gaussian fares, shifted MNL weights.
Instance build_hotel_instance(const HotelTemplate& tpl, const HotelCell& cell, std::uint64_t seed);

// Per-type fare draw: mean fare, sd sqrt(fare), high resampled until above low
// (100 attempts, then clamped to low + 1).
void draw_fares(const HotelTemplate& tpl, double scale_factor, Rng& rng, std::vector<double>& low,
                std::vector<double>& high);

// ---- MNL estimation ----

struct TransactionRecord {
    std::vector<std::string> features;
    Assortment offered;
    int chosen = -1;  // product id or -1 for no purchase
};

// Delimited text: header line, then features..., offered ids separated by
// spaces, chosen id or "none". Throws std::runtime_error with a line number.
std::vector<TransactionRecord> read_transactions(std::istream& in, char delim = ',');

struct ChoiceData {
    std::vector<Assortment> offered;
    std::vector<int> chosen;
    bool outside_observed = false;  // any no-purchase record
};

// Log-likelihood in utilities u (one per product) and its gradient. With the
// outside option observed its utility is fixed at 0; otherwise the model is
// conditional on a purchase. ridge adds -ridge/2 |u|^2.
double mnl_loglik(const std::vector<double>& u, const ChoiceData& d, double ridge);
void mnl_gradient(const std::vector<double>& u, const ChoiceData& d, double ridge, std::vector<double>& g);

struct FitOptions {
    double tol = 1e-6;
    int max_iter = 20000;
    double ridge = 1e-4;      // fallback only
    double scale_factor = 1.0;
    bool shift_no_purchase = true;  // v0 = max v, times scale_factor
};

struct MnlFit {
    std::vector<double> utilities;
    ChoiceModel model;
    bool converged = false;
    bool regularized = false;
    int iterations = 0;
    std::string warning;
};

MnlFit fit_mnl_type(const ChoiceData& d, int num_products, const FitOptions& opt = {});

struct MnlFitResult {
    std::vector<std::vector<std::string>> type_keys;  // feature tuple per type
    std::vector<MnlFit> fits;
};

// Types are the distinct feature tuples in sorted order.
MnlFitResult fit_mnl(const std::vector<TransactionRecord>& records, int num_products, const FitOptions& opt = {});

// ---- sweeps ----

enum class SweepPolicy { Greedy, Conservative, Norepeat, NorepeatHomog };
const char* sweep_policy_name(SweepPolicy p);

struct SweepSpec {
    std::vector<double> loading_factors{1, 2, 3, 4, 5, 6, 7};
    std::vector<int> patience{1};
    std::vector<int> caps{4};
    std::vector<double> scale_factors{2.0};
    std::uint64_t replicas = 200;
    std::uint64_t seed = 1;
    double alpha = 1.0;  // norepeat policies
};

struct SweepRow {
    HotelCell cell;
    std::string policy;
    double lp_opt = 0.0;
    double mean = 0.0, se = 0.0;
    double pct = 0.0, pct_se = 0.0;  // percent of the LP bound
    std::string status = "ok";
};

std::vector<SweepRow> run_sweep(const HotelTemplate& tpl, const SweepSpec& spec,
                                const std::vector<SweepPolicy>& policies, ExecMode mode = ExecMode::Parallel);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace mcao
