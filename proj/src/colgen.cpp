#include "mcao/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mcao {

DualBundle extract_duals(const Instance& inst, const McdlpModel& md, const LpSolution& sol) {
    const int n = inst.n(), m = inst.m(), P = inst.num_products();
    DualBundle d;
    d.zeta.assign(sol.y.begin(), sol.y.begin() + n);
    d.gamma.assign(sol.y.begin() + n, sol.y.begin() + n + m);
    d.beta.assign(sol.y.begin() + n + m, sol.y.begin() + n + 2 * m);
    d.sigma.assign(m, std::vector<double>(P, 0.0));
    if (has_overlap_rows(md.variant))
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < P; ++k) d.sigma[j][k] = sol.y[std::size_t(n + 2 * m + j * P + k)];
    return d;
}

Subproblem make_subproblem(const Instance& inst, const DualBundle& d, int j) {
    Subproblem sp;
    const auto& ty = inst.types[j];
    const double Q = inst.total_arrival(j);
    sp.num_products = inst.num_products();
    sp.choice = &ty.choice;
    sp.family = inst.family;
    sp.w.resize(sp.num_products);
    for (int k = 0; k < sp.num_products; ++k)
        sp.w[k] = Q * ty.revenue[k] - Q * d.zeta[inst.products[k].item] - d.gamma[j];
    sp.sigma = d.sigma[j];
    return sp;
}

double subproblem_value(const Subproblem& sp, const Assortment& S) {
    if (S.empty()) return 0.0;
    std::vector<double> p;
    sp.choice->probs(S, p);
    double v = 0.0;
    for (std::size_t u = 0; u < S.size(); ++u) v += sp.w[S[u]] * p[u] - sp.sigma[S[u]];
    return v;
}

namespace {

constexpr std::size_t kBruteLimit = std::size_t(1) << 16;

std::vector<Assortment> family_members(const Family& fam, int P) {
    if (fam.mode == Family::Mode::Explicit) {
        if (fam.sets.size() > kBruteLimit) throw std::length_error("brute-force oracle: family too large");
        return fam.sets;
    }
    if (count_up_to(P, fam.k) > kBruteLimit) throw std::length_error("brute-force oracle: family too large");
    std::vector<Assortment> out;
    Assortment cur;
    auto rec = [&](auto&& self, int start) -> void {
        for (int i = start; i < P; ++i) {
            cur.push_back(i);
            out.push_back(cur);
            if (int(cur.size()) < fam.k) self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

double mnl_f(const std::vector<double>& w, const ChoiceModel& ch, const Assortment& S) {
    double num = 0.0, den = ch.no_purchase;
    for (int k : S) {
        num += w[k] * ch.weights[k];
        den += ch.weights[k];
    }
    return num / den;
}

}  // namespace

OracleResult subproblem_bruteforce(const Subproblem& sp, const std::set<Assortment>* exclude) {
    OracleResult best;
    for (const auto& S : family_members(sp.family, sp.num_products)) {
        if (exclude && exclude->count(S)) continue;
        double v = subproblem_value(sp, S);
        if (v > best.value) {
            best.value = v;
            best.set = S;
        }
    }
    return best;
}

OracleResult subproblem_mnl_repeated(const Subproblem& sp) {
    if (!sp.choice || sp.choice->kind != ChoiceKind::Mnl) throw std::invalid_argument("mnl-exact: MNL choice model required");
    const ChoiceModel& ch = *sp.choice;
    std::vector<int> ids;
    for (int k = 0; k < sp.num_products; ++k) {
        if (sp.sigma[k] > 1e-12) throw std::invalid_argument("mnl-exact: overlap duals must be zero");
        if (sp.w[k] > 0.0 && ch.weights[k] > 0.0) ids.push_back(k);
    }
    OracleResult res;
    if (ids.empty()) return res;
    if (sp.family.mode == Family::Mode::Explicit) {
        res = subproblem_bruteforce(sp);
        return res;
    }
    const int cap = sp.family.k;
    if (cap >= int(ids.size())) {
        // The optimum is a prefix of the items sorted by descending w.
        std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return sp.w[a] > sp.w[b]; });
        double num = 0.0, den = ch.no_purchase;
        for (std::size_t r = 0; r < ids.size(); ++r) {
            num += sp.w[ids[r]] * ch.weights[ids[r]];
            den += ch.weights[ids[r]];
            if (num / den > res.value + 1e-15) {
                res.value = num / den;
                res.set.assign(ids.begin(), ids.begin() + r + 1);
            }
        }
    } else {
        // Dinkelbach: S(lambda) = top-cap items by v (w - lambda) > 0; the
        // ratio increases strictly until it is a fixed point.
        double lambda = 0.0;
        std::vector<int> order = ids;
        for (int iter = 0; iter < 1000; ++iter) {
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return ch.weights[a] * (sp.w[a] - lambda) > ch.weights[b] * (sp.w[b] - lambda);
            });
            Assortment S;
            for (int k : order) {
                if (int(S.size()) >= cap || ch.weights[k] * (sp.w[k] - lambda) <= 0.0) break;
                S.push_back(k);
            }
            std::sort(S.begin(), S.end());
            double f = S.empty() ? 0.0 : mnl_f(sp.w, ch, S);
            if (f > res.value + 1e-15) {
                res.value = f;
                res.set = S;
            }
            if (f <= lambda + 1e-15) break;
            lambda = f;
        }
    }
    std::sort(res.set.begin(), res.set.end());
    res.value = subproblem_value(sp, res.set);
    return res;
}

OracleKind parse_oracle(const std::string& s) {
    if (s == "brute") return OracleKind::Brute;
    if (s == "mnl-exact") return OracleKind::MnlExact;
    if (s == "mnl-fptas") return OracleKind::MnlFptas;
    throw std::invalid_argument("unknown oracle " + s);
}

const char* oracle_name(OracleKind k) {
    switch (k) {
        case OracleKind::Brute: return "brute";
        case OracleKind::MnlExact: return "mnl-exact";
        case OracleKind::MnlFptas: return "mnl-fptas";
    }
    return "?";
}

namespace {

void check_colgen(const Instance& inst, const ColgenOptions& opt) {
    if (opt.variant == McdlpVariant::SingleItemLP) throw std::invalid_argument("colgen: single-item LP is fully enumerated");
    bool mnl = std::all_of(inst.types.begin(), inst.types.end(),
                           [](const CustomerType& t) { return t.choice.kind == ChoiceKind::Mnl; });
    if (opt.oracle != OracleKind::Brute && !mnl) throw std::invalid_argument("colgen: MNL oracles need MNL choice models");
    if (opt.oracle == OracleKind::MnlExact && has_overlap_rows(opt.variant))
        throw std::invalid_argument("colgen: mnl-exact solves the repeated case only; use brute or mnl-fptas");
    if (opt.oracle == OracleKind::MnlFptas &&
        (inst.family.mode != Family::Mode::UpTo || inst.family.k < inst.num_products()))
        throw std::invalid_argument("colgen: mnl-fptas needs a family without a size cap");
}

}  // namespace

ColgenResult column_generate(const Instance& inst, const ColgenOptions& opt) {
    check_variant(inst, opt.variant);
    check_colgen(inst, opt);
    const int m = inst.m();
    ColgenResult out;
    // No-overlap variants already force x <= 1 through the overlap rows; a
    // looser box keeps every reduced cost in the row duals. Without them the
    // box is part of the model and pricing skips columns already present.
    BuildOptions bo;
    const bool overlap = has_overlap_rows(opt.variant);
    if (overlap) bo.upper = 2.0;

    std::vector<Column> start;
    std::vector<std::set<Assortment>> present(m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < inst.num_products(); ++k)
            if (inst.family_contains({k})) {
                start.push_back({j, {k}});
                present[j].insert({k});
            }
    if (start.empty() && inst.family.mode == Family::Mode::Explicit && !inst.family.sets.empty())
        for (int j = 0; j < m; ++j) {
            start.push_back({j, inst.family.sets.front()});
            present[j].insert(inst.family.sets.front());
        }
    McdlpModel md = build_with_columns(inst, opt.variant, start, bo);

    const std::size_t fam = inst.family_size();
    const std::size_t bound = fam == std::numeric_limits<std::size_t>::max() ? fam : fam * m + 1;
    for (;;) {
        McdlpSolution sol;
        try {
            sol = solve_model(md);
        } catch (const std::exception& e) {
            if (out.rounds == 0) throw;
            out.partial = true;
            out.diagnostics.push_back(std::string("master solve failed: ") + e.what());
            break;
        }
        ++out.rounds;
        out.objectives.push_back(sol.opt);
        DualBundle d = extract_duals(inst, sol.model, sol.lp);
        md = sol.model;
        out.solution = std::move(sol);

        std::vector<Column> add;
        double alpha_hat = 1.0;
        bool measured = true;
        try {
            for (int j = 0; j < m; ++j) {
                Subproblem sp = make_subproblem(inst, d, j);
                OracleResult r;
                switch (opt.oracle) {
                    case OracleKind::Brute:
                        r = subproblem_bruteforce(sp, overlap ? nullptr : &present[j]);
                        break;
                    case OracleKind::MnlExact:
                        r = subproblem_mnl_repeated(sp);
                        if (present[j].count(r.set)) r = subproblem_bruteforce(sp, &present[j]);
                        break;
                    case OracleKind::MnlFptas:
                        r = subproblem_mnl_fptas(sp, opt.fptas);
                        if (!overlap && present[j].count(r.set)) r = subproblem_bruteforce(sp, &present[j]);
                        break;
                }
                if (!r.set.empty() && r.value > d.beta[j] + opt.tol_rc && !present[j].count(r.set)) {
                    add.push_back({j, r.set});
                    continue;
                }
                if (opt.measure_factor && opt.oracle != OracleKind::Brute && measured) {
                    // Factor against the brute-force maximum of this round.
                    try {
                        OracleResult ref = subproblem_bruteforce(sp, overlap ? nullptr : &present[j]);
                        if (ref.value > opt.tol_rc) alpha_hat = std::min(alpha_hat, std::max(0.0, r.value) / ref.value);
                    } catch (const std::length_error&) {
                        measured = false;
                    }
                }
            }
        } catch (const std::exception& e) {
            out.partial = true;
            out.certified = false;
            out.diagnostics.push_back(std::string("oracle failed: ") + e.what());
            break;
        }
        if (add.empty()) {
            out.alpha_hat = measured ? alpha_hat : std::numeric_limits<double>::quiet_NaN();
            if (!measured) out.certified = false;
            break;
        }
        for (const auto& c : add) {
            add_column(inst, md, c, bo);
            present[c.type].insert(c.set);
            ++out.columns_added;
        }
        if (out.rounds >= opt.max_rounds || std::size_t(out.rounds) > bound) {
            out.partial = true;
            out.diagnostics.push_back("round limit reached");
            break;
        }
    }
    return out;
}

}  // namespace mcao
