#include "mcao/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mcao {

namespace {

constexpr double kTol = 1e-9;
constexpr std::size_t kTabularLimit = std::size_t(1) << 16;

int position_in(int product, const Assortment& S) {
    auto it = std::lower_bound(S.begin(), S.end(), product);
    if (it == S.end() || *it != product) return -1;
    return int(it - S.begin());
}

std::string fmt_set(const Assortment& S) {
    std::ostringstream os;
    os << '{';
    for (std::size_t k = 0; k < S.size(); ++k) os << (k ? "," : "") << S[k];
    os << '}';
    return os.str();
}

}  // namespace

double ChoiceModel::prob(int product, const Assortment& S) const {
    int pos = position_in(product, S);
    if (pos < 0) throw std::invalid_argument("choice_prob: item not in assortment");
    if (kind == ChoiceKind::Mnl) {
        double denom = no_purchase;
        for (int k : S) denom += weights.at(k);
        return weights.at(product) / denom;
    }
    auto it = table.find(S);
    if (it == table.end()) throw std::invalid_argument("choice_prob: assortment " + fmt_set(S) + " not tabulated");
    return it->second[pos];
}

void ChoiceModel::probs(const Assortment& S, std::vector<double>& out) const {
    out.resize(S.size());
    if (S.empty()) return;
    if (kind == ChoiceKind::Mnl) {
        double denom = no_purchase;
        for (int k : S) denom += weights[k];
        for (std::size_t k = 0; k < S.size(); ++k) out[k] = weights[S[k]] / denom;
        return;
    }
    auto it = table.find(S);
    if (it == table.end()) throw std::invalid_argument("choice_prob: assortment " + fmt_set(S) + " not tabulated");
    out = it->second;
}

double ChoiceModel::mass(const Assortment& S) const {
    if (S.empty()) return 0.0;
    if (kind == ChoiceKind::Mnl) {
        double v = 0.0;
        for (int k : S) v += weights[k];
        return v / (no_purchase + v);
    }
    std::vector<double> p;
    probs(S, p);
    double s = 0.0;
    for (double x : p) s += x;
    return s;
}

Family Family::up_to(int k) {
    Family f;
    f.mode = Mode::UpTo;
    f.k = k;
    return f;
}

Family Family::explicit_list(std::vector<Assortment> sets) {
    Family f;
    f.mode = Mode::Explicit;
    for (auto& s : sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    sets.erase(std::remove_if(sets.begin(), sets.end(), [](const Assortment& s) { return s.empty(); }),
               sets.end());
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    f.sets = std::move(sets);
    f.k = 0;
    for (auto& s : f.sets) f.k = std::max(f.k, int(s.size()));
    return f;
}

double Instance::q(int t, int j) const {
    return arrival_table.empty() ? types[j].arrival : arrival_table[t][j];
}

double Instance::total_arrival(int j) const {
    if (arrival_table.empty()) return T * types[j].arrival;
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += arrival_table[t][j];
    return s;
}

bool Instance::family_contains(const Assortment& S) const {
    if (S.empty()) return true;
    if (family.mode == Family::Mode::UpTo) return int(S.size()) <= family.k;
    return std::binary_search(family.sets.begin(), family.sets.end(), S);
}

std::size_t count_up_to(int p, int k) {
    const std::size_t cap = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    double c = 1.0;  // C(p, s) in floating point for the saturation test
    std::size_t ci = 1;
    for (int s = 1; s <= std::min(k, p); ++s) {
        c = c * double(p - s + 1) / double(s);
        if (c > 1e18) return cap;
        ci = std::size_t(std::llround(c));
        if (total > cap - ci) return cap;
        total += ci;
    }
    return total;
}

std::size_t Instance::family_size() const {
    if (family.mode == Family::Mode::Explicit) return family.sets.size();
    return count_up_to(num_products(), family.k);
}

std::vector<Assortment> Instance::enumerate_family(std::size_t limit) const {
    if (family.mode == Family::Mode::Explicit) {
        if (family.sets.size() > limit) throw std::length_error("family too large to enumerate; use colgen");
        return family.sets;
    }
    if (family_size() > limit) throw std::length_error("family too large to enumerate; use colgen");
    const int P = num_products();
    std::vector<Assortment> out;
    Assortment cur;
    // Depth-first over increasing ids yields lexicographic order directly.
    auto rec = [&](auto&& self, int start) -> void {
        for (int i = start; i < P; ++i) {
            cur.push_back(i);
            out.push_back(cur);
            if (int(cur.size()) < family.k) self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

void make_unit_products(Instance& inst) {
    inst.products.clear();
    for (int i = 0; i < inst.n(); ++i) inst.products.push_back({i, 0});
}

ValidationReport validate(const Instance& inst) {
    ValidationReport r;
    auto bad = [&](std::string s) { r.violations.push_back(std::move(s)); };
    const int n = inst.n(), m = inst.m(), P = inst.num_products();
    if (inst.T < 1) bad("T must be positive");
    if (n < 1) bad("no items");
    if (m < 1) bad("no customer types");
    if (P < 1) bad("no products");
    for (int i = 0; i < n; ++i)
        if (inst.items[i].inventory < 0) bad("negative inventory at item " + std::to_string(i));
    for (int k = 0; k < P; ++k) {
        const auto& pr = inst.products[k];
        if (pr.item < 0 || pr.item >= n) bad("product " + std::to_string(k) + " refers to a missing item");
        if (pr.level < 0 || pr.level >= inst.price_levels)
            bad("product " + std::to_string(k) + " has an out-of-range price level");
    }
    if (!r.ok()) return r;

    if (!inst.arrival_table.empty() && int(inst.arrival_table.size()) != inst.T) bad("arrival table must have T rows");
    for (int t = 0; t < inst.T && r.ok(); ++t) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            double q = inst.arrival_table.empty() ? inst.types[j].arrival
                                                  : (int(inst.arrival_table[t].size()) == m ? inst.arrival_table[t][j] : -1.0);
            if (!(q >= 0.0) || !std::isfinite(q)) {
                bad("invalid arrival probability at t=" + std::to_string(t + 1));
                q = 0.0;
            }
            s += q;
        }
        if (s > 1.0 + kTol) bad("arrival mass exceeds 1 at t=" + std::to_string(t + 1));
        if (inst.arrival_table.empty()) break;  // identical for every t
    }

    std::vector<Assortment> fam;
    bool fam_ok = true;
    if (inst.family.mode == Family::Mode::UpTo && inst.family.k < 1) {
        bad("family size cap must be positive");
        fam_ok = false;
    }
    if (inst.family.mode == Family::Mode::Explicit) {
        for (std::size_t s = 0; s < inst.family.sets.size(); ++s) {
            const auto& S = inst.family.sets[s];
            if (!std::is_sorted(S.begin(), S.end()) || std::adjacent_find(S.begin(), S.end()) != S.end())
                bad("explicit family set " + std::to_string(s) + " is not sorted and duplicate-free");
            for (int k : S)
                if (k < 0 || k >= P) {
                    bad("explicit family set " + std::to_string(s) + " has an unknown product");
                    fam_ok = false;
                }
            if (s > 0 && !(inst.family.sets[s - 1] < S)) bad("explicit family list is not deduplicated");
        }
    }
    if (inst.matching) {
        if ((inst.family.mode == Family::Mode::UpTo && inst.family.k > 1) ||
            (inst.family.mode == Family::Mode::Explicit &&
             std::any_of(inst.family.sets.begin(), inst.family.sets.end(),
                         [](const Assortment& S) { return S.size() > 1; })))
            bad("matching instance requires |S| <= 1");
    }

    for (int j = 0; j < m; ++j) {
        const auto& ty = inst.types[j];
        const std::string tag = "type " + std::to_string(j) + ": ";
        bool has_l = ty.patience > 0, has_p = ty.leave_prob > 0.0;
        if (has_l == has_p) bad(tag + "exactly one of patience and leave_prob must be set");
        if (has_p && ty.leave_prob > 1.0) bad(tag + "leave_prob must lie in (0,1]");
        if (ty.patience < 0) bad(tag + "negative patience");
        if (int(ty.revenue.size()) != P) bad(tag + "revenue vector length differs from product count");
        for (double v : ty.revenue)
            if (!std::isfinite(v) || v < 0.0) {
                bad(tag + "revenues must be finite and non-negative");
                break;
            }
        const auto& cm = ty.choice;
        if (cm.kind == ChoiceKind::Mnl) {
            if (int(cm.weights.size()) != P) bad(tag + "MNL weight vector length differs from product count");
            for (double v : cm.weights)
                if (!(v > 0.0) || !std::isfinite(v)) {
                    bad(tag + "MNL weights must be positive");
                    break;
                }
            if (!(cm.no_purchase > 0.0)) bad(tag + "no-purchase weight must be positive");
            continue;
        }
        // Tabular: the whole family must be enumerated.
        if (!fam_ok) continue;
        if (inst.family_size() > kTabularLimit) {
            bad(tag + "tabular model on a family larger than 2^16");
            continue;
        }
        if (fam.empty()) fam = inst.enumerate_family();
        for (const auto& [S, p] : cm.table) {
            if (p.size() != S.size()) bad(tag + "tabular row " + fmt_set(S) + " has the wrong length");
        }
        bool sub_ok = true, norm_ok = true, range_ok = true;
        for (const auto& S : fam) {
            auto it = cm.table.find(S);
            if (it == cm.table.end()) {
                bad(tag + "tabular model misses assortment " + fmt_set(S));
                continue;
            }
            if (it->second.size() != S.size()) continue;
            double s = 0.0;
            for (double x : it->second) {
                if (!(x >= 0.0 && x <= 1.0)) range_ok = false;
                s += x;
            }
            if (s > 1.0 + kTol) norm_ok = false;
        }
        if (!range_ok) bad(tag + "tabular probability outside [0,1]");
        if (!norm_ok) bad(tag + "choice probabilities sum above 1");
        for (const auto& S : fam) {
            if (!sub_ok) break;
            auto it = cm.table.find(S);
            if (it == cm.table.end() || it->second.size() != S.size()) continue;
            for (int extra = 0; extra < P && sub_ok; ++extra) {
                if (std::binary_search(S.begin(), S.end(), extra)) continue;
                Assortment U = S;
                U.insert(std::upper_bound(U.begin(), U.end(), extra), extra);
                auto ju = cm.table.find(U);
                if (ju == cm.table.end() || ju->second.size() != U.size()) continue;
                for (std::size_t a = 0; a < S.size(); ++a) {
                    double pu = ju->second[position_in(S[a], U)];
                    if (it->second[a] < pu - kTol) {
                        sub_ok = false;
                        bad(tag + "substitutability violated: p(" + std::to_string(S[a]) + "," + fmt_set(S) +
                            ") < p(" + std::to_string(S[a]) + "," + fmt_set(U) + ")");
                        break;
                    }
                }
            }
        }
    }
    return r;
}

Instance split_inventory(const Instance& inst) {
    const int n = inst.n(), P = inst.num_products();
    bool any = false;
    for (const auto& it : inst.items) any = any || it.inventory > 1;
    if (!any) return inst;

    Instance out = inst;
    out.items.clear();
    std::vector<std::vector<int>> copies(n);
    for (int i = 0; i < n; ++i) {
        int b = inst.items[i].inventory;
        for (int c = 0; c < std::max(b, 1); ++c) {
            copies[i].push_back(out.n());
            out.items.push_back({b == 0 ? 0 : 1, inst.parent_of(i)});
        }
    }
    // Products: one per (copy, level); image[k] lists the images of product k.
    std::vector<std::vector<int>> image(P);
    out.products.clear();
    for (int k = 0; k < P; ++k)
        for (int c : copies[inst.products[k].item]) {
            image[k].push_back(out.num_products());
            out.products.push_back({c, inst.products[k].level});
        }
    const int P2 = out.num_products();

    bool any_tabular = false;
    for (const auto& ty : inst.types) any_tabular = any_tabular || ty.choice.kind == ChoiceKind::Tabular;

    // Copy images of an assortment: each member independently picks one copy.
    auto images_of = [&](const Assortment& S) {
        std::vector<Assortment> acc{{}};
        for (int k : S) {
            std::vector<Assortment> nxt;
            for (const auto& a : acc)
                for (int img : image[k]) {
                    auto b = a;
                    b.push_back(img);
                    nxt.push_back(std::move(b));
                }
            acc.swap(nxt);
            if (acc.size() > kTabularLimit) throw std::length_error("split_inventory: tabular family too large");
        }
        for (auto& a : acc) std::sort(a.begin(), a.end());
        return acc;
    };

    std::vector<Assortment> fam;
    if (any_tabular) fam = inst.enumerate_family(kTabularLimit);
    if (inst.family.mode == Family::Mode::Explicit || any_tabular) {
        std::vector<Assortment> src = inst.family.mode == Family::Mode::Explicit ? inst.family.sets : fam;
        std::vector<Assortment> sets;
        for (const auto& S : src)
            for (auto& a : images_of(S)) sets.push_back(std::move(a));
        out.family = Family::explicit_list(std::move(sets));
    }

    for (int j = 0; j < inst.m(); ++j) {
        const auto& ty = inst.types[j];
        auto& oy = out.types[j];
        oy.revenue.assign(P2, 0.0);
        for (int k = 0; k < P; ++k)
            for (int img : image[k]) oy.revenue[img] = ty.revenue[k];
        if (ty.choice.kind == ChoiceKind::Mnl) {
            oy.choice.weights.assign(P2, 0.0);
            for (int k = 0; k < P; ++k)
                for (int img : image[k]) oy.choice.weights[img] = ty.choice.weights[k];
        } else {
            oy.choice.table.clear();
            std::vector<int> owner(P2);
            for (int k = 0; k < P; ++k)
                for (int img : image[k]) owner[img] = k;
            for (const auto& S : fam) {
                const auto& p = ty.choice.table.at(S);
                for (auto& a : images_of(S)) {
                    std::vector<double> q(a.size());
                    for (std::size_t u = 0; u < a.size(); ++u) q[u] = p[position_in(owner[a[u]], S)];
                    oy.choice.table.emplace(std::move(a), std::move(q));
                }
            }
        }
    }
    return out;
}

}  // namespace mcao
