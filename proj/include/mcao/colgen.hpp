#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"

namespace mcao {

// Row duals of a restricted MCDLP, all >= 0. sigma is [type][product] and
// stays zero for variants without overlap rows.
struct DualBundle {
    std::vector<double> zeta;                // inventory
    std::vector<double> gamma;               // sell-one
    std::vector<double> beta;                // patience
    std::vector<std::vector<double>> sigma;  // overlap
};

DualBundle extract_duals(const Instance& inst, const McdlpModel& md, const LpSolution& sol);

// Pricing problem of one type: max over S of sum_{k in S} (w_k p(k,S) - sigma_k).
struct Subproblem {
    std::vector<double> w;      // per product: Q r_k - Q zeta_item(k) - gamma_j
    std::vector<double> sigma;  // per product
    const ChoiceModel* choice = nullptr;
    Family family;
    int num_products = 0;
};

Subproblem make_subproblem(const Instance& inst, const DualBundle& d, int type);
double subproblem_value(const Subproblem& sp, const Assortment& S);

struct OracleResult {
    Assortment set;  // empty means "no offer", value 0
    double value = 0.0;
    bool certified = true;  // false when the oracle cannot vouch for its factor
};

// Exhaustive search over the family, skipping sets in `exclude`. Throws
// std::length_error above 2^16 members.
OracleResult subproblem_bruteforce(const Subproblem& sp, const std::set<Assortment>* exclude = nullptr);

// Exact optimum for MNL with sigma = 0. Nested w-ordered scan for uncapped
// families, Dinkelbach iteration with a top-k step for size caps.
OracleResult subproblem_mnl_repeated(const Subproblem& sp);

struct FptasConfig {
    double eps = 0.1;
    // Skip (gamma, delta) pairs whose ratio gamma/delta lies outside the
    // attainable range [min w, max w] widened by (1 + eps)^2.
    bool prune_pairs = true;
};

struct FptasStats {
    std::size_t phi_points = 0, gamma_points = 0, delta_points = 0, dp_runs = 0;
};

// Scaled knapsack DP over (gamma, delta, phi) guesses, items with w > 0.
// Requires MNL and a family without a size cap below the product count;
// all-zero sigma goes to the exact repeated-case oracle.
OracleResult subproblem_mnl_fptas(const Subproblem& sp, const FptasConfig& cfg, FptasStats* stats = nullptr);

// Smallest alpha_c with f >= (1 + 2/alpha_c) h, 0 when h = 0, infinity when f <= h.
double certified_alpha(double f, double h);
// 1 - (alpha_c + 1) eps; meaningful when 0 <= alpha_c < 1/eps - 1.
double fptas_factor(double alpha_c, double eps);
bool fptas_hypothesis(double alpha_c, double eps);

// Min-mass table of the knapsack DP: V[c][a][b] for c = 0..n items, a in
// [0, I] (clamped from above), b in [0, J]. Infinity marks infeasible cells.
using DpTable = std::vector<std::vector<std::vector<double>>>;
DpTable dp_layers(const std::vector<long>& wt, const std::vector<long>& vt, const std::vector<double>& mass, int I,
                  int J);

// Discretization of one (gamma, delta) guess.
void fptas_discretize(const std::vector<double>& w, const std::vector<double>& v, double gamma, double delta,
                      double eps, std::vector<long>& wt, std::vector<long>& vt);
int fptas_I(int n, double eps);
int fptas_J(int n, double eps);

enum class OracleKind { Brute, MnlExact, MnlFptas };
OracleKind parse_oracle(const std::string& s);
const char* oracle_name(OracleKind k);

struct ColgenOptions {
    McdlpVariant variant = McdlpVariant::McdlpNr;
    OracleKind oracle = OracleKind::Brute;
    FptasConfig fptas;
    double tol_rc = 1e-7;
    int max_rounds = 100000;
    // Brute-force reference per type in the final round to measure the oracle factor.
    bool measure_factor = true;
};

struct ColgenResult {
    McdlpSolution solution;
    int rounds = 0;
    int columns_added = 0;
    std::vector<double> objectives;  // master optimum per round
    double alpha_hat = 1.0;          // measured factor, NaN when unmeasurable
    bool certified = true;
    bool partial = false;  // oracle failure: solution is the last restricted optimum
    std::vector<std::string> diagnostics;
};

ColgenResult column_generate(const Instance& inst, const ColgenOptions& opt);

}  // namespace mcao
