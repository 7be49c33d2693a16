#pragma once

// Ranking and selection over scored event pairs: full ranking with
// deterministic tie-breaks, top-k cuts, proportional per-genre sampling
// with largest-remainder quotas, duplicate removal, and the paired
// high-vs-low judgment export.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpmine/counts.hpp"
#include "cpmine/event.hpp"
#include "cpmine/rng.hpp"
#include "cpmine/scoring.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

struct scored_pair {
    event e1, e2;
    double score = 0.0;
    scorer_kind scorer = scorer_kind::cp;
    int window = 1;  // w, or w_max for cp_variant
    std::string genre;
    std::uint64_t n12 = 0, n21 = 0;  // ordered counts within the window
    std::uint64_t n1 = 0, n2 = 0;    // unigram counts

    std::uint64_t joint() const { return n12 + n21; }
};

// Descending score; ties broken by higher unordered joint count, then by
// ascending canonical forms.
inline bool rank_order(const scored_pair& a, const scored_pair& b, const std::string& ac1,
                       const std::string& ac2, const std::string& bc1, const std::string& bc2) {
    if (a.score != b.score) return a.score > b.score;
    if (a.joint() != b.joint()) return a.joint() > b.joint();
    if (ac1 != bc1) return ac1 < bc1;
    return ac2 < bc2;
}

// Scores every ordered pair whose score is defined under the config and
// returns them best-first.  The genre tag defaults to the table's.
inline std::vector<scored_pair> rank_pairs(const count_table& t, const score_config& cfg,
                                           scorer_kind kind,
                                           std::optional<std::string> genre = std::nullopt) {
    std::vector<scored_pair> out;
    if (t.total_events() == 0) return out;
    cfg.validate_against(t, kind);
    const int w = kind == scorer_kind::cp_variant ? cfg.w_max : cfg.window;
    const std::string tag = genre ? *genre : t.genre();

    // candidate = unordered id pair observed at any distance, both directions tried
    std::vector<std::pair<count_table::event_id, count_table::event_id>> candidates;
    t.for_each_pair([&](count_table::event_id a, count_table::event_id b, const auto&) {
        if (a <= b) candidates.emplace_back(a, b);  // canonical orientation; reverse key visits once
    });
    // pairs only seen in the (b, a) orientation with b > a still need a visit
    t.for_each_pair([&](count_table::event_id a, count_table::event_id b, const auto&) {
        if (a > b && t.pair_count_within(b, a, t.max_distance()) == 0) candidates.emplace_back(b, a);
    });

    struct keyed {
        scored_pair sp;
        std::string c1, c2;
    };
    std::vector<keyed> rows;
    auto try_emit = [&](count_table::event_id a, count_table::event_id b) {
        auto s = score_ids(t, a, b, cfg, kind);
        if (!s) return;
        auto pw = detail::gather(t, a, b, w, window_mode::cumulative);
        keyed k;
        k.c1 = t.name(a);
        k.c2 = t.name(b);
        k.sp.e1 = parse_canonical(k.c1);
        k.sp.e2 = parse_canonical(k.c2);
        k.sp.score = *s;
        k.sp.scorer = kind;
        k.sp.window = w;
        k.sp.genre = tag;
        k.sp.n12 = pw.n12;
        k.sp.n21 = pw.n21;
        k.sp.n1 = pw.n1;
        k.sp.n2 = pw.n2;
        rows.push_back(std::move(k));
    };
    for (auto [a, b] : candidates) {
        try_emit(a, b);
        if (a != b) try_emit(b, a);
    }

    std::sort(rows.begin(), rows.end(), [](const keyed& x, const keyed& y) {
        return rank_order(x.sp, y.sp, x.c1, x.c2, y.c1, y.c2);
    });
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(std::move(r.sp));
    return out;
}

inline std::vector<scored_pair> take_top(const std::vector<scored_pair>& ranked, std::size_t k) {
    return {ranked.begin(),
            ranked.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranked.size()))};
}

// ---------------------------------------------------------------------------
// Proportional per-genre sampling.  Quotas follow the largest-remainder
// apportionment of `total` by weight, capped by each genre's available
// list length; overflow moves to uncapped genres in remainder order.
// Quotas sum to `total` whenever enough pairs exist overall.

struct proportional_sample_result {
    std::map<std::string, std::size_t> quotas;  // genre -> pairs taken
    std::vector<scored_pair> selected;          // concatenated by genre name order
};

inline proportional_sample_result proportional_sample(
    const std::map<std::string, std::vector<scored_pair>>& per_genre,
    const std::map<std::string, std::uint64_t>& weights, std::size_t total) {
    std::uint64_t weight_sum = 0;
    for (const auto& [g, w] : weights) weight_sum += w;
    if (weight_sum == 0) throw usage_error("genre weights sum to zero");

    struct entry {
        std::string genre;
        std::uint64_t weight;
        std::uint64_t remainder;  // of total*weight / weight_sum
        std::size_t quota = 0;
        std::size_t avail = 0;
    };
    std::vector<entry> entries;
    std::size_t base_sum = 0;
    for (const auto& [g, w] : weights) {
        entry e;
        e.genre = g;
        e.weight = w;
        unsigned __int128 scaled = static_cast<unsigned __int128>(total) * w;
        e.quota = static_cast<std::size_t>(scaled / weight_sum);
        e.remainder = static_cast<std::uint64_t>(scaled % weight_sum);
        auto it = per_genre.find(g);
        e.avail = it == per_genre.end() ? 0 : it->second.size();
        base_sum += e.quota;
        entries.push_back(std::move(e));
    }

    auto remainder_order = [](const entry& a, const entry& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.genre < b.genre;
    };
    std::sort(entries.begin(), entries.end(), remainder_order);
    for (std::size_t i = 0; base_sum < total && i < entries.size(); ++i, ++base_sum)
        ++entries[i].quota;

    // cap at availability, pushing the overflow to genres with room
    while (true) {
        std::size_t overflow = 0;
        for (auto& e : entries) {
            if (e.quota > e.avail) {
                overflow += e.quota - e.avail;
                e.quota = e.avail;
            }
        }
        if (overflow == 0) break;
        bool placed = false;
        for (auto& e : entries) {
            while (overflow > 0 && e.quota < e.avail) {
                ++e.quota;
                --overflow;
                placed = true;
            }
        }
        if (!placed || overflow == 0) break;
    }

    proportional_sample_result result;
    std::sort(entries.begin(), entries.end(),
              [](const entry& a, const entry& b) { return a.genre < b.genre; });
    for (const auto& e : entries) {
        result.quotas[e.genre] = e.quota;
        if (e.quota == 0) continue;
        const auto& list = per_genre.at(e.genre);
        for (std::size_t i = 0; i < e.quota; ++i) result.selected.push_back(list[i]);
    }
    return result;
}

// Removes duplicate (e1, e2) pairs, keeping the highest-score instance
// (the earliest on equal scores) at its original position.
inline std::vector<scored_pair> dedup(const std::vector<scored_pair>& pairs) {
    std::unordered_map<std::string, std::size_t> best;  // key -> index into pairs
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string key = canonical_form(pairs[i].e1) + '\t' + canonical_form(pairs[i].e2);
        auto [it, inserted] = best.try_emplace(key, i);
        if (!inserted && pairs[i].score > pairs[it->second].score) it->second = i;
    }
    std::vector<std::size_t> keep;
    keep.reserve(best.size());
    for (const auto& [key, idx] : best) keep.push_back(idx);
    std::sort(keep.begin(), keep.end());
    std::vector<scored_pair> out;
    out.reserve(keep.size());
    for (std::size_t idx : keep) out.push_back(pairs[idx]);
    return out;
}

// ---------------------------------------------------------------------------
// Judgment items: one per high pair, partnered with a low pair drawn
// without replacement while the low pool lasts (then the pool refills),
// with left/right position randomized.  Fully determined by the seed.

struct judgment_item {
    std::size_t item_id = 0;
    scored_pair pair_a;  // exported on the left
    scored_pair pair_b;  // exported on the right
    bool a_is_high = false;
};

inline std::vector<judgment_item> make_judgment_items(const std::vector<scored_pair>& high,
                                                      const std::vector<scored_pair>& low,
                                                      std::uint64_t seed) {
    std::vector<judgment_item> items;
    if (high.empty()) return items;
    if (low.empty()) throw usage_error("low pair list is empty");

    rng_engine rng(seed);
    std::vector<std::size_t> pool;
    auto refill = [&] {
        pool.resize(low.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    };
    refill();

    items.reserve(high.size());
    for (std::size_t i = 0; i < high.size(); ++i) {
        if (pool.empty()) refill();
        std::size_t k = static_cast<std::size_t>(bounded(rng, pool.size()));
        const scored_pair& partner = low[pool[k]];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));

        judgment_item item;
        item.item_id = i;
        item.a_is_high = bounded(rng, 2) == 0;
        if (item.a_is_high) {
            item.pair_a = high[i];
            item.pair_b = partner;
        } else {
            item.pair_a = partner;
            item.pair_b = high[i];
        }
        items.push_back(std::move(item));
    }
    return items;
}

inline std::string render_pair(const scored_pair& p) {
    return canonical_form(p.e1) + " -> " + canonical_form(p.e2);
}

// Visible file carries only the item id and the two pair texts; the key
// file maps item_id to which side held the high pair.
inline void write_judgment_files(const std::vector<judgment_item>& items, std::ostream& visible,
                                 std::ostream& key) {
    visible << "item_id,pair_left,pair_right\n";
    key << "item_id,high_side\n";
    for (const auto& item : items) {
        visible << item.item_id << ',' << render_pair(item.pair_a) << ','
                << render_pair(item.pair_b) << '\n';
        key << item.item_id << ',' << (item.a_is_high ? "left" : "right") << '\n';
    }
}

// ---------------------------------------------------------------------------
// Pairs file: tab-separated with a header line,
//   e1 e2 score scorer window genre n12 n21 n1 n2

inline constexpr std::string_view kPairsHeader =
    "e1\te2\tscore\tscorer\twindow\tgenre\tn12\tn21\tn1\tn2";

inline void save_pairs(const std::vector<scored_pair>& pairs, std::ostream& os) {
    os << kPairsHeader << '\n';
    for (const auto& p : pairs) {
        os << canonical_form(p.e1) << '\t' << canonical_form(p.e2) << '\t'
           << format_double(p.score) << '\t' << to_string(p.scorer) << '\t' << p.window << '\t'
           << p.genre << '\t' << p.n12 << '\t' << p.n21 << '\t' << p.n1 << '\t' << p.n2 << '\n';
    }
}

inline std::vector<scored_pair> load_pairs(std::istream& is) {
    std::vector<scored_pair> out;
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kPairsHeader) throw data_error("missing pairs file header", lineno);
            saw_header = true;
            continue;
        }
        auto f = split(line, '\t');
        if (f.size() != 10) throw data_error("expected 10 tab-separated fields", lineno);
        scored_pair p;
        p.e1 = parse_canonical(f[0], lineno);
        p.e2 = parse_canonical(f[1], lineno);
        if (!parse_double(f[2], p.score)) throw data_error("bad score field", lineno);
        auto kind = scorer_from_string(f[3]);
        if (!kind) throw data_error("unknown scorer \"" + std::string(f[3]) + "\"", lineno);
        p.scorer = *kind;
        if (!parse_i32(f[4], p.window)) throw data_error("bad window field", lineno);
        p.genre = std::string(f[5]);
        if (!parse_u64(f[6], p.n12) || !parse_u64(f[7], p.n21) || !parse_u64(f[8], p.n1) ||
            !parse_u64(f[9], p.n2))
            throw data_error("bad count field", lineno);
        out.push_back(std::move(p));
    }
    if (!saw_header) throw data_error("missing pairs file header");
    return out;
}

}  // namespace cpmine
