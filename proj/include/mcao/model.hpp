#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace mcao {

// Sorted, duplicate-free product ids. The empty assortment means "no offer".
using Assortment = std::vector<int>;

struct Item {
    int inventory = 1;
    int parent = -1;  // original item id after split_inventory; -1 means itself
};

// A product is an (item, price level) pair. Products of one item share its stock.
struct Product {
    int item = 0;
    int level = 0;
};

enum class ChoiceKind { Mnl, Tabular };

struct ChoiceModel {
    ChoiceKind kind = ChoiceKind::Mnl;
    std::vector<double> weights;  // MNL, one per product
    double no_purchase = 1.0;     // MNL v_0
    // Tabular: purchase probabilities aligned with the members of the key.
    std::map<Assortment, std::vector<double>> table;

    // p(product, S). Throws std::invalid_argument when product is not in S or
    // a tabular entry is missing.
    double prob(int product, const Assortment& S) const;
    // Fills out[k] = p(S[k], S).
    void probs(const Assortment& S, std::vector<double>& out) const;
    // Sum of purchase probabilities over S.
    double mass(const Assortment& S) const;
};

struct CustomerType {
    double arrival = 0.0;     // stationary q_j; ignored when Instance::arrival_table is set
    int patience = 1;         // deterministic patience, 0 when leave_prob is used
    double leave_prob = 0.0;  // > 0 selects geometric patience
    std::vector<double> revenue;  // per product
    ChoiceModel choice;

    bool random_patience() const { return leave_prob > 0.0; }
};

struct Family {
    enum class Mode { UpTo, Explicit };
    Mode mode = Mode::UpTo;
    int k = 1;
    std::vector<Assortment> sets;  // Explicit mode only

    static Family up_to(int k);
    static Family explicit_list(std::vector<Assortment> sets);
};

struct Instance {
    int T = 1;
    std::vector<Item> items;
    std::vector<Product> products;
    std::vector<CustomerType> types;
    std::vector<std::vector<double>> arrival_table;  // T x m; empty when stationary
    Family family;
    int price_levels = 1;
    bool repeated_offers_allowed = false;
    bool matching = false;  // single-item offers only

    int n() const { return int(items.size()); }
    int m() const { return int(types.size()); }
    int num_products() const { return int(products.size()); }
    bool stationary() const { return arrival_table.empty(); }
    // Arrival probability of type j at step t (0-based).
    double q(int t, int j) const;
    // Sum over t of q(t, j).
    double total_arrival(int j) const;
    int parent_of(int item) const { return items[item].parent < 0 ? item : items[item].parent; }

    bool family_contains(const Assortment& S) const;
    // Nonempty members in lexicographic order. Throws when the family has more
    // than `limit` members.
    std::vector<Assortment> enumerate_family(std::size_t limit = std::size_t(1) << 20) const;
    std::size_t family_size() const;  // saturates at SIZE_MAX
};

// One product per item at level 0; the usual layout when price levels are unused.
void make_unit_products(Instance& inst);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Instance& inst);

// Splits every multi-unit item into unit copies that remember their parent.
Instance split_inventory(const Instance& inst);

// Number of subsets of size 1..k of a p-element ground set, saturating.
std::size_t count_up_to(int p, int k);

}  // namespace mcao
