#include "mihkit/coinjoin/detect.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>
#include <vector>

#include "mihkit/error.hpp"

namespace mihkit::coinjoin {

namespace {

void require_spending(const Transaction& tx) {
    if (tx.is_coinbase()) throw InputError("coinbase transaction " + tx.txid + " cannot be classified");
}

bool passes_gate(const Transaction& tx) {
    return tx.inputs.size() >= 2 && tx.outputs.size() >= 3;
}

class SubsetSearch {
public:
    struct Budget {
        std::uint64_t steps = 0;
        std::uint64_t limit = 0;
    };
    struct Exhausted {};

    SubsetSearch(std::vector<Amount> inputs, Amount lo, Amount hi, std::size_t bins, Budget& budget)
        : values_(std::move(inputs)), lo_(lo), hi_(hi), bins_(bins, 0), budget_(budget) {
        std::sort(values_.begin(), values_.end(), std::greater<>());
        suffix_.assign(values_.size() + 1, 0);
        for (std::size_t i = values_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + values_[i];
    }

    /// Throws Exhausted when the budget runs out.
    bool run() { return visit(0); }

private:
    bool visit(std::size_t idx) {
        if (++budget_.steps > budget_.limit) throw Exhausted{};

        unsigned __int128 deficit = 0;
        for (Amount b : bins_) {
            if (b < lo_) deficit += lo_ - b;
        }
        if (deficit > suffix_[idx]) return false;
        if (deficit == 0) return true;  // every bin is in its window; rest is leftover
        if (idx == values_.size()) return false;

        std::vector<Amount> key = bins_;
        std::sort(key.begin(), key.end());
        key.push_back(idx);
        if (failed_.contains(key)) return false;

        const Amount x = values_[idx];
        std::set<Amount> tried;
        for (std::size_t j = 0; j < bins_.size(); ++j) {
            const Amount b = bins_[j];
            if (x > hi_ || b > hi_ - x || !tried.insert(b).second) continue;
            bins_[j] = b + x;
            const bool ok = visit(idx + 1);
            bins_[j] = b;
            if (ok) return true;
        }
        if (visit(idx + 1)) return true;  // leave input idx unassigned

        failed_.insert(std::move(key));
        return false;
    }

    struct VecHash {
        std::size_t operator()(const std::vector<Amount>& v) const noexcept {
            std::size_t h = v.size();
            for (Amount a : v) h ^= std::hash<Amount>{}(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };

    std::vector<Amount> values_;
    std::vector<unsigned __int128> suffix_;
    Amount lo_;
    Amount hi_;
    std::vector<Amount> bins_;
    Budget& budget_;
    std::unordered_set<std::vector<Amount>, VecHash> failed_;
};

/// Largest sum accepted for output value v, saturating at 2^64 - 1.
Amount window_high(Amount v, const FullParams& p) {
    const unsigned __int128 num =
        static_cast<unsigned __int128>(v) * (p.fee_denominator + static_cast<unsigned __int128>(p.fee_numerator)) +
        static_cast<unsigned __int128>(p.min_base_fee) * p.fee_denominator;
    const unsigned __int128 hi = num / p.fee_denominator;
    return hi > std::numeric_limits<Amount>::max() ? std::numeric_limits<Amount>::max()
                                                   : static_cast<Amount>(hi);
}

}  // namespace

void validate(const FullParams& p) {
    if (p.fee_denominator == 0) throw InputError("percentage fee denominator must be > 0");
    if (p.max_search_steps == 0) throw InputError("max_search_steps must be >= 1");
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Timeout: return "timeout";
    }
    return "?";
}

bool detect_structural(const Transaction& tx) {
    require_spending(tx);
    if (!passes_gate(tx)) return false;
    const std::size_t p = (tx.outputs.size() + 1) / 2;
    if (p > tx.inputs.size()) return false;

    std::vector<const chain::Address*> addrs;
    for (const auto& in : tx.inputs) addrs.push_back(&in.address);
    std::sort(addrs.begin(), addrs.end(), [](auto* a, auto* b) { return *a < *b; });
    const auto distinct = static_cast<std::size_t>(
        std::unique(addrs.begin(), addrs.end(), [](auto* a, auto* b) { return *a == *b; }) - addrs.begin());
    if (distinct < p) return false;

    std::vector<Amount> values;
    for (const auto& out : tx.outputs) values.push_back(out.value);
    std::sort(values.begin(), values.end());
    std::size_t best = 0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        best = std::max(best, j - i);
        i = j;
    }
    return best == p;
}

Verdict detect_full(const Transaction& tx, const FullParams& params) {
    require_spending(tx);
    validate(params);
    if (!passes_gate(tx)) return Verdict::No;

    std::map<Amount, std::size_t> multiplicity;
    for (const auto& out : tx.outputs) ++multiplicity[out.value];
    std::vector<Amount> inputs;
    for (const auto& in : tx.inputs) inputs.push_back(in.value);

    SubsetSearch::Budget budget{0, params.max_search_steps};
    for (const auto& [value, count] : multiplicity) {
        if (count < 2 || count > inputs.size()) continue;
        // inputs are >= 1, so a lower bound of 1 is the same as non-emptiness
        const Amount lo = std::max<Amount>(value, 1);
        try {
            SubsetSearch search(inputs, lo, window_high(value, params), count, budget);
            if (search.run()) return Verdict::Yes;
        } catch (const SubsetSearch::Exhausted&) {
            return Verdict::Timeout;
        }
    }
    return Verdict::No;
}

std::string_view definition(HeuristicKind kind) {
    if (kind == HeuristicKind::Structural) {
        return "A non-coinbase transaction with n inputs and m outputs is a CoinJoin when all hold: "
               "n >= 2; m >= 3; p = ceil(m / 2) satisfies p <= n; p <= the number of distinct input "
               "addresses; and the most frequent output value occurs exactly p times.";
    }
    return "A non-coinbase transaction with at least 2 inputs and 3 outputs is a CoinJoin when some "
           "output value v occurs k >= 2 times and "
           "the inputs contain k pairwise disjoint non-empty subsets, each summing to s with "
           "v <= s <= v * (1 + fee_numerator / fee_denominator) + min_base_fee. The search is "
           "exhaustive; when it exceeds max_search_steps the verdict is timeout, which is never "
           "counted as a CoinJoin.";
}

std::string HeuristicConfig::method_id() const {
    return kind == HeuristicKind::Structural ? "coinjoin-structural/1" : "coinjoin-full/1";
}

evidence::Document HeuristicConfig::params() const {
    if (kind == HeuristicKind::Structural) return {{"heuristic", "structural"}};
    return {{"heuristic", "full"},
            {"min_base_fee", full.min_base_fee},
            {"percentage_fee", {{"numerator", full.fee_numerator}, {"denominator", full.fee_denominator}}},
            {"max_search_steps", full.max_search_steps}};
}

HeuristicConfig heuristic_from_json(const evidence::Document& doc) {
    HeuristicConfig c;
    try {
        const auto kind = doc.at("heuristic").get<std::string>();
        if (kind == "structural") {
            c.kind = HeuristicKind::Structural;
        } else if (kind == "full") {
            c.kind = HeuristicKind::Full;
            c.full.min_base_fee = doc.at("min_base_fee").get<Amount>();
            c.full.fee_numerator = doc.at("percentage_fee").at("numerator").get<std::uint64_t>();
            c.full.fee_denominator = doc.at("percentage_fee").at("denominator").get<std::uint64_t>();
            c.full.max_search_steps = doc.at("max_search_steps").get<std::uint64_t>();
            validate(c.full);
        } else {
            throw InputError("unknown heuristic '" + kind + "'");
        }
    } catch (const evidence::Document::exception& e) {
        throw InputError(std::string("malformed heuristic parameters: ") + e.what());
    }
    return c;
}

Verdict classify(const Transaction& tx, const HeuristicConfig& config) {
    if (config.kind == HeuristicKind::Structural) return detect_structural(tx) ? Verdict::Yes : Verdict::No;
    return detect_full(tx, config.full);
}

}  // namespace mihkit::coinjoin
