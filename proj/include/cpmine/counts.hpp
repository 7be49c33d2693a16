#pragma once

// Ordered per-distance pair counts plus unigram counts over event
// sequences: the sufficient statistic for every association score.
// Pairs never cross document boundaries.  Counting shards merge to the
// exact single-pass result, and the persisted form is canonical (sorted),
// so equal tables serialize byte-identically.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cpmine/event.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

class count_table {
public:
    using event_id = std::uint32_t;

    explicit count_table(int max_distance, std::string genre = {})
        : max_distance_(max_distance), genre_(std::move(genre)),
          pairs_at_distance_(static_cast<std::size_t>(max_distance) + 1, 0) {
        if (max_distance < 1) throw usage_error("max_distance must be >= 1");
    }

    int max_distance() const { return max_distance_; }
    const std::string& genre() const { return genre_; }
    void set_genre(std::string g) { genre_ = std::move(g); }
    std::uint64_t total_events() const { return total_events_; }
    std::size_t vocabulary_size() const { return names_.size(); }

    std::uint64_t pairs_at_distance(int d) const {
        check_distance(d);
        return pairs_at_distance_[static_cast<std::size_t>(d)];
    }

    // Total ordered position pairs with distance <= w.
    std::uint64_t pairs_within(int w) const {
        check_distance(w);
        std::uint64_t total = 0;
        for (int d = 1; d <= w; ++d) total += pairs_at_distance_[static_cast<std::size_t>(d)];
        return total;
    }

    std::uint64_t event_count(std::string_view canonical) const {
        auto it = index_.find(std::string(canonical));
        return it == index_.end() ? 0 : unigrams_[it->second];
    }

    std::uint64_t pair_count(std::string_view c1, std::string_view c2, int d) const {
        check_distance(d);
        auto i1 = index_.find(std::string(c1));
        auto i2 = index_.find(std::string(c2));
        if (i1 == index_.end() || i2 == index_.end()) return 0;
        auto it = pairs_.find(key(i1->second, i2->second));
        return it == pairs_.end() ? 0 : it->second[static_cast<std::size_t>(d - 1)];
    }

    // Sum of ordered pair counts over distances 1..w.
    std::uint64_t pair_count_within(std::string_view c1, std::string_view c2, int w) const {
        check_distance(w);
        auto i1 = index_.find(std::string(c1));
        auto i2 = index_.find(std::string(c2));
        if (i1 == index_.end() || i2 == index_.end()) return 0;
        return pair_count_within(i1->second, i2->second, w);
    }

    // id-based accessors for ranking loops
    const std::string& name(event_id id) const { return names_[id]; }
    std::uint64_t event_count(event_id id) const { return unigrams_[id]; }
    std::uint64_t pair_count_at(event_id a, event_id b, int d) const {
        auto it = pairs_.find(key(a, b));
        return it == pairs_.end() ? 0 : it->second[static_cast<std::size_t>(d - 1)];
    }
    std::uint64_t pair_count_within(event_id a, event_id b, int w) const {
        auto it = pairs_.find(key(a, b));
        if (it == pairs_.end()) return 0;
        std::uint64_t total = 0;
        for (int d = 1; d <= w; ++d) total += it->second[static_cast<std::size_t>(d - 1)];
        return total;
    }
    std::optional<event_id> find(std::string_view canonical) const {
        auto it = index_.find(std::string(canonical));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Every ordered (a, b) with a recorded count at any distance.
    template <typename Fn>
    void for_each_pair(Fn&& fn) const {
        for (const auto& [k, counts] : pairs_)
            fn(static_cast<event_id>(k >> 32), static_cast<event_id>(k & 0xffffffffu), counts);
    }

    void add_sequence(const event_sequence& seq) {
        std::vector<event_id> ids;
        ids.reserve(seq.events.size());
        for (const auto& e : seq.events) ids.push_back(intern(canonical_form(e)));
        add_ids(ids);
    }

    // Counting over pre-canonicalized event names (one sequence).
    void add_canonical_sequence(std::span<const std::string> names) {
        std::vector<event_id> ids;
        ids.reserve(names.size());
        for (const auto& n : names) ids.push_back(intern(n));
        add_ids(ids);
    }

    void merge_from(const count_table& other) {
        if (other.max_distance_ != max_distance_)
            throw usage_error("cannot merge count tables with different max_distance");
        if (genre_ != other.genre_ && !other.genre_.empty())
            genre_ = genre_.empty() ? other.genre_ : "mixed";
        total_events_ += other.total_events_;
        for (int d = 1; d <= max_distance_; ++d)
            pairs_at_distance_[static_cast<std::size_t>(d)] +=
                other.pairs_at_distance_[static_cast<std::size_t>(d)];
        std::vector<event_id> remap(other.names_.size());
        for (std::size_t i = 0; i < other.names_.size(); ++i) {
            event_id id = intern(other.names_[i]);
            unigrams_[id] += other.unigrams_[i];
            remap[i] = id;
        }
        for (const auto& [k, counts] : other.pairs_) {
            event_id a = remap[static_cast<event_id>(k >> 32)];
            event_id b = remap[static_cast<event_id>(k & 0xffffffffu)];
            auto& slot = pair_slot(a, b);
            for (int d = 0; d < max_distance_; ++d)
                slot[static_cast<std::size_t>(d)] += counts[static_cast<std::size_t>(d)];
        }
    }

    // -----------------------------------------------------------------------
    // Persistence: header lines, then "U <canonical> <count>" unigram
    // records sorted by canonical form, then
    // "P <d> <canonical1> TAB <canonical2> <count>" pair records sorted by
    // (d, canonical1, canonical2).  save(load(s)) == s.

    void save(std::ostream& os) const {
        os << "count_table v1\n";
        os << "genre\t" << genre_ << '\n';
        os << "max_distance\t" << max_distance_ << '\n';
        os << "total_events\t" << total_events_ << '\n';
        for (int d = 1; d <= max_distance_; ++d)
            os << "pairs_at_distance\t" << d << '\t'
               << pairs_at_distance_[static_cast<std::size_t>(d)] << '\n';

        std::vector<event_id> order(names_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<event_id>(i);
        std::sort(order.begin(), order.end(),
                  [&](event_id a, event_id b) { return names_[a] < names_[b]; });
        for (event_id id : order)
            if (unigrams_[id] > 0) os << "U " << names_[id] << ' ' << unigrams_[id] << '\n';

        struct row {
            int d;
            std::string_view c1, c2;
            std::uint64_t n;
        };
        std::vector<row> rows;
        for (const auto& [k, counts] : pairs_) {
            auto a = static_cast<event_id>(k >> 32);
            auto b = static_cast<event_id>(k & 0xffffffffu);
            for (int d = 1; d <= max_distance_; ++d) {
                std::uint64_t n = counts[static_cast<std::size_t>(d - 1)];
                if (n > 0) rows.push_back({d, names_[a], names_[b], n});
            }
        }
        std::sort(rows.begin(), rows.end(), [](const row& x, const row& y) {
            return std::tie(x.d, x.c1, x.c2) < std::tie(y.d, y.c1, y.c2);
        });
        for (const auto& r : rows)
            os << "P " << r.d << ' ' << r.c1 << '\t' << r.c2 << ' ' << r.n << '\n';
    }

    static count_table load(std::istream& is) {
        std::string line;
        std::size_t lineno = 1;
        if (!std::getline(is, line) || trim(line) != "count_table v1")
            throw data_error("missing count_table header", lineno);

        std::string genre;
        int max_distance = 0;
        std::uint64_t total_events = 0;
        std::vector<std::uint64_t> totals_at;  // 1-based once max_distance known
        bool have_genre = false, have_max = false, have_total = false;

        count_table table(1);
        bool table_ready = false;
        std::vector<std::uint64_t> unigram_sum_check;
        std::uint64_t unigram_total = 0;
        std::vector<std::uint64_t> pair_sums;

        auto ensure_table = [&](std::size_t ln) {
            if (table_ready) return;
            if (!have_genre || !have_max || !have_total)
                throw data_error("incomplete header before records", ln);
            table = count_table(max_distance, genre);
            table.total_events_ = total_events;
            totals_at.resize(static_cast<std::size_t>(max_distance) + 1, 0);
            table.pairs_at_distance_ = totals_at;
            pair_sums.assign(static_cast<std::size_t>(max_distance) + 1, 0);
            table_ready = true;
        };

        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;

            if (line.starts_with("genre\t") || line.starts_with("max_distance\t") ||
                line.starts_with("total_events\t") || line.starts_with("pairs_at_distance\t")) {
                if (table_ready) throw data_error("header record after data records", lineno);
            }
            if (line.starts_with("genre\t")) {
                genre = line.substr(6);
                have_genre = true;
            } else if (line.starts_with("max_distance\t")) {
                if (!parse_i32(std::string_view(line).substr(13), max_distance) || max_distance < 1)
                    throw data_error("bad max_distance", lineno);
                have_max = true;
            } else if (line.starts_with("total_events\t")) {
                if (!parse_u64(std::string_view(line).substr(13), total_events))
                    throw data_error("bad total_events", lineno);
                have_total = true;
            } else if (line.starts_with("pairs_at_distance\t")) {
                auto f = split(line, '\t');
                int d = 0;
                std::uint64_t n = 0;
                if (f.size() != 3 || !parse_i32(f[1], d) || !parse_u64(f[2], n) || d < 1)
                    throw data_error("bad pairs_at_distance record", lineno);
                if (static_cast<std::size_t>(d) >= totals_at.size())
                    totals_at.resize(static_cast<std::size_t>(d) + 1, 0);
                totals_at[static_cast<std::size_t>(d)] = n;
            } else if (line.starts_with("U ")) {
                ensure_table(lineno);
                std::string_view rest = std::string_view(line).substr(2);
                std::size_t sp = rest.rfind(' ');
                std::uint64_t n = 0;
                if (sp == std::string_view::npos || !parse_u64(rest.substr(sp + 1), n) || n == 0)
                    throw data_error("bad unigram record", lineno);
                std::string_view canonical = rest.substr(0, sp);
                if (canonical.empty()) throw data_error("empty canonical form", lineno);
                event_id id = table.intern(std::string(canonical));
                if (table.unigrams_[id] != 0) throw data_error("duplicate unigram record", lineno);
                table.unigrams_[id] = n;
                unigram_total += n;
            } else if (line.starts_with("P ")) {
                ensure_table(lineno);
                std::string_view rest = std::string_view(line).substr(2);
                std::size_t sp1 = rest.find(' ');
                if (sp1 == std::string_view::npos) throw data_error("bad pair record", lineno);
                int d = 0;
                if (!parse_i32(rest.substr(0, sp1), d) || d < 1 || d > max_distance)
                    throw data_error("bad pair distance", lineno);
                rest = rest.substr(sp1 + 1);
                std::size_t tab = rest.find('\t');
                if (tab == std::string_view::npos) throw data_error("bad pair record", lineno);
                std::string_view c1 = rest.substr(0, tab);
                rest = rest.substr(tab + 1);
                std::size_t sp2 = rest.rfind(' ');
                std::uint64_t n = 0;
                if (sp2 == std::string_view::npos || !parse_u64(rest.substr(sp2 + 1), n) || n == 0)
                    throw data_error("bad pair record", lineno);
                std::string_view c2 = rest.substr(0, sp2);
                if (c1.empty() || c2.empty()) throw data_error("empty canonical form", lineno);
                event_id a = table.intern(std::string(c1));
                event_id b = table.intern(std::string(c2));
                auto& slot = table.pair_slot(a, b);
                if (slot[static_cast<std::size_t>(d - 1)] != 0)
                    throw data_error("duplicate pair record", lineno);
                slot[static_cast<std::size_t>(d - 1)] = n;
                pair_sums[static_cast<std::size_t>(d)] += n;
            } else {
                throw data_error("unrecognized record \"" + line + "\"", lineno);
            }
        }

        ensure_table(lineno);
        if (totals_at.size() > static_cast<std::size_t>(max_distance) + 1)
            throw data_error("pairs_at_distance beyond max_distance");
        if (unigram_total != table.total_events_)
            throw data_error("unigram counts do not sum to total_events");
        for (int d = 1; d <= max_distance; ++d)
            if (pair_sums[static_cast<std::size_t>(d)] !=
                table.pairs_at_distance_[static_cast<std::size_t>(d)])
                throw data_error("pair counts at distance " + std::to_string(d) +
                                 " do not sum to declared total");
        return table;
    }

private:
    static std::uint64_t key(event_id a, event_id b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    void check_distance(int d) const {
        if (d < 1 || d > max_distance_)
            throw usage_error("distance " + std::to_string(d) + " out of range 1.." +
                              std::to_string(max_distance_));
    }

    event_id intern(std::string canonical) {
        auto it = index_.find(canonical);
        if (it != index_.end()) return it->second;
        auto id = static_cast<event_id>(names_.size());
        index_.emplace(canonical, id);
        names_.push_back(std::move(canonical));
        unigrams_.push_back(0);
        return id;
    }

    std::vector<std::uint64_t>& pair_slot(event_id a, event_id b) {
        auto [it, inserted] = pairs_.try_emplace(key(a, b));
        if (inserted) it->second.assign(static_cast<std::size_t>(max_distance_), 0);
        return it->second;
    }

    void add_ids(const std::vector<event_id>& ids) {
        const auto len = static_cast<std::ptrdiff_t>(ids.size());
        for (event_id id : ids) ++unigrams_[id];
        total_events_ += ids.size();
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            for (std::ptrdiff_t j = i + 1; j < len && j - i <= max_distance_; ++j)
                ++pair_slot(ids[i], ids[j])[static_cast<std::size_t>(j - i - 1)];
        }
        for (int d = 1; d <= max_distance_; ++d)
            if (len > d) pairs_at_distance_[static_cast<std::size_t>(d)] += len - d;
    }

    int max_distance_;
    std::string genre_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, event_id> index_;
    std::vector<std::uint64_t> unigrams_;
    std::uint64_t total_events_ = 0;
    std::vector<std::uint64_t> pairs_at_distance_;  // index d, [0] unused
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> pairs_;
};

inline count_table count_pairs(std::span<const event_sequence> sequences, int max_distance) {
    std::string genre;
    bool first = true, mixed = false;
    for (const auto& seq : sequences) {
        if (first) {
            genre = seq.genre;
            first = false;
        } else if (seq.genre != genre) {
            mixed = true;
        }
    }
    count_table table(max_distance, mixed ? "mixed" : genre);
    for (const auto& seq : sequences) table.add_sequence(seq);
    return table;
}

// Parallel counting: sequences are dealt round-robin over `jobs` shards,
// each counted independently, then merged in shard order.  The result is
// identical to the single-pass table.
inline count_table count_pairs_sharded(std::span<const event_sequence> sequences,
                                       int max_distance, int jobs) {
    if (jobs < 1) throw usage_error("jobs must be >= 1");
    if (jobs == 1) return count_pairs(sequences, max_distance);

    std::vector<count_table> shards;
    shards.reserve(static_cast<std::size_t>(jobs));
    for (int s = 0; s < jobs; ++s) shards.emplace_back(max_distance);

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int s = 0; s < jobs; ++s) {
        workers.emplace_back([&, s] {
            for (std::size_t i = static_cast<std::size_t>(s); i < sequences.size();
                 i += static_cast<std::size_t>(jobs))
                shards[static_cast<std::size_t>(s)].add_sequence(sequences[i]);
        });
    }
    for (auto& w : workers) w.join();

    count_table merged = count_pairs(sequences.subspan(0, 0), max_distance);
    for (const auto& shard : shards) merged.merge_from(shard);

    // genre tag from the full input, as in the single-pass path
    std::string genre;
    bool first = true, mixed = false;
    for (const auto& seq : sequences) {
        if (first) {
            genre = seq.genre;
            first = false;
        } else if (seq.genre != genre) {
            mixed = true;
        }
    }
    merged.set_genre(mixed ? "mixed" : genre);
    return merged;
}

inline count_table merge(const count_table& a, const count_table& b) {
    count_table out = a;
    out.merge_from(b);
    return out;
}

}  // namespace cpmine
