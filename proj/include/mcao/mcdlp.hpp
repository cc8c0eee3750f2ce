#pragma once

#include <string>
#include <vector>

#include "mcao/lpcore.hpp"
#include "mcao/model.hpp"
#include "mcao/stats.hpp"

namespace mcao {

enum class McdlpVariant { SingleItemLP, McdlpR, McdlpNr, McdlpNrs, MmcdlpNr };

const char* variant_name(McdlpVariant v);
McdlpVariant parse_variant(const std::string& s);
// True when the variant carries per-(product, type) no-repeat rows.
bool has_overlap_rows(McdlpVariant v);

struct Column {
    int type = 0;
    Assortment set;
};

struct BuildOptions {
    // Upper bound placed on every x_j(S). The no-repeat rows already imply
    // x <= 1, so column generation raises this to keep the bound inactive.
    double upper = 1.0;
    std::size_t family_limit = std::size_t(1) << 20;
};

// Row names: inv[i], sell[j], pat[j], ovl[k,j] (k a product id).
struct McdlpModel {
    McdlpVariant variant = McdlpVariant::McdlpNr;
    LpModel lp;
    std::vector<Column> columns;  // one per LP variable, (type, assortment) row-major
};

struct PlanEntry {
    Assortment set;
    double x = 0.0;
};

struct McdlpSolution {
    McdlpVariant variant = McdlpVariant::McdlpNr;
    McdlpModel model;
    LpSolution lp;
    double opt = 0.0;
    // Positive-weight assortments per type in column order.
    std::vector<std::vector<PlanEntry>> plan;

    // x_{ij} for a single-item plan (0 when absent).
    double x_single(int type, int product) const;
};

// Throws std::invalid_argument on variant precondition violations and
// std::length_error when the family is too large ("use colgen").
void check_variant(const Instance& inst, McdlpVariant v);
McdlpModel build(const Instance& inst, McdlpVariant v, const BuildOptions& opt = {});
McdlpModel build_with_columns(const Instance& inst, McdlpVariant v, const std::vector<Column>& cols,
                              const BuildOptions& opt = {});
// Appends a column to an existing model.
void add_column(const Instance& inst, McdlpModel& md, const Column& col, const BuildOptions& opt = {});

McdlpSolution solve_model(McdlpModel md);
McdlpSolution solve_mcdlp(const Instance& inst, McdlpVariant v, const BuildOptions& opt = {});

// Splits each stationary type j into T*q_j identical types with arrival 1/T,
// so every type arrives once in expectation. Requires T*q_j integral.
Instance integralize(const Instance& inst);

struct Verdict {
    bool consistent = true;
    double mean = 0.0;
    double bound = 0.0;  // OPT + 3 SE
};

Verdict verify_policy_upper_bound(double mcdlp_opt, const MonteCarloEstimate& revenue);

}  // namespace mcao
