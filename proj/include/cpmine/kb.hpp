#pragma once

// External event-pair knowledge bases and overlap reports against mined
// pairs.  Two input formats: a verb-pair lexicon with bracketed relation
// tags ("pack [happens-before] leave :: 8.5") and a tuple export with
// directed co-occurrence frequencies at windows 1/5/50 in both
// directions.  Matching is order-sensitive; the default projection keeps
// only the verbs of the mined tuples.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cpmine/event.hpp"
#include "cpmine/ranking.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

struct kb_pair {
    std::string verb1, verb2;  // lowercase lemmas
    std::string relation;
    std::optional<double> strength;
};

struct external_kb {
    std::string name;
    std::vector<kb_pair> pairs;  // unique on (verb1, verb2, relation)

    bool contains(std::string_view v1, std::string_view v2) const {
        for (const auto& p : pairs)
            if (p.verb1 == v1 && p.verb2 == v2) return true;
        return false;
    }
};

// ---------------------------------------------------------------------------
// Verb-pair lexicon: "verb1 [relation] verb2 :: strength", one pair per
// line, strength optional.  When a relation filter is given, other
// relations are dropped.

inline external_kb load_verbocean(std::istream& is, std::optional<std::string> relation_filter,
                                  std::string name = "verbocean") {
    external_kb kb;
    kb.name = std::move(name);
    std::set<std::tuple<std::string, std::string, std::string>> seen;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view s = trim(line);
        if (s.empty() || s[0] == '#') continue;

        std::size_t open = s.find('[');
        std::size_t close = s.find(']');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open)
            throw data_error("missing [relation] tag", lineno);
        std::string_view v1 = trim(s.substr(0, open));
        std::string relation(trim(s.substr(open + 1, close - open - 1)));
        std::string_view rest = trim(s.substr(close + 1));

        std::optional<double> strength;
        std::string_view v2 = rest;
        if (std::size_t sep = rest.find("::"); sep != std::string_view::npos) {
            v2 = trim(rest.substr(0, sep));
            std::string_view num = trim(rest.substr(sep + 2));
            double val = 0;
            if (!parse_double(num, val))
                throw data_error("bad strength \"" + std::string(num) + "\"", lineno);
            strength = val;
        }
        if (v1.empty() || v2.empty() || relation.empty())
            throw data_error("incomplete pair record", lineno);
        if (v1.find(' ') != std::string_view::npos || v2.find(' ') != std::string_view::npos)
            throw data_error("verb contains whitespace", lineno);

        if (relation_filter && relation != *relation_filter) continue;
        kb_pair p{to_lower(v1), to_lower(v2), std::move(relation), strength};
        if (seen.emplace(p.verb1, p.verb2, p.relation).second) kb.pairs.push_back(std::move(p));
    }
    return kb;
}

// ---------------------------------------------------------------------------
// Tuple export with directed frequencies: tab-separated columns
//   verb1 verb2 fwd@1 fwd@5 fwd@50 rev@1 rev@5 rev@50
// (fwd = first before second).  Tuples below min_window_freq at the
// requested window (1, 5 or 50) are dropped.  The kept tuples carry a
// strength: the symmetric conditional probability recomputed from the
// carried counts, summed over the three windows, with marginals taken
// over the whole file.

namespace detail {

inline int relgram_window_column(int window) {
    switch (window) {
        case 1: return 0;
        case 5: return 1;
        case 50: return 2;
        default: throw usage_error("tuple window must be 1, 5 or 50");
    }
}

}  // namespace detail

inline external_kb load_relgram_tuples(std::istream& is, std::uint64_t min_window_freq,
                                       int window, std::string name = "relgrams") {
    struct tuple_row {
        std::string v1, v2;
        std::uint64_t fwd[3] = {0, 0, 0};
        std::uint64_t rev[3] = {0, 0, 0};
    };
    const int col = detail::relgram_window_column(window);

    std::vector<tuple_row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, '\t');
        if (f.size() < 8) throw data_error("missing frequency column (need 8 fields)", lineno);
        tuple_row r;
        r.v1 = to_lower(trim(f[0]));
        r.v2 = to_lower(trim(f[1]));
        if (r.v1.empty() || r.v2.empty()) throw data_error("empty tuple verb", lineno);
        for (int i = 0; i < 3; ++i) {
            if (!parse_u64(trim(f[2 + i]), r.fwd[i]))
                throw data_error("bad frequency field " + std::to_string(3 + i), lineno);
            if (!parse_u64(trim(f[5 + i]), r.rev[i]))
                throw data_error("bad frequency field " + std::to_string(6 + i), lineno);
        }
        rows.push_back(std::move(r));
    }

    // within-file marginals per window: every occurrence of a verb in any tuple
    std::unordered_map<std::string, std::uint64_t> marginal[3];
    std::uint64_t window_total[3] = {0, 0, 0};
    for (const auto& r : rows) {
        for (int i = 0; i < 3; ++i) {
            std::uint64_t joint = r.fwd[i] + r.rev[i];
            marginal[i][r.v1] += joint;
            marginal[i][r.v2] += joint;
            window_total[i] += joint;
        }
    }

    external_kb kb;
    kb.name = std::move(name);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : rows) {
        if (r.fwd[col] < min_window_freq) continue;
        double scp_total = 0.0;
        for (int i = 0; i < 3; ++i) {
            std::uint64_t joint = r.fwd[i] + r.rev[i];
            std::uint64_t m1 = marginal[i][r.v1];
            std::uint64_t m2 = marginal[i][r.v2];
            if (joint == 0 || m1 == 0 || m2 == 0) continue;
            double j = static_cast<double>(joint);
            scp_total += (j / static_cast<double>(m1)) * (j / static_cast<double>(m2));
        }
        if (!seen.emplace(r.v1, r.v2).second) continue;
        kb.pairs.push_back({r.v1, r.v2, "tuple", scp_total});
    }
    std::sort(kb.pairs.begin(), kb.pairs.end(), [](const kb_pair& a, const kb_pair& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return std::tie(a.verb1, a.verb2) < std::tie(b.verb1, b.verb2);
    });
    return kb;
}

// ---------------------------------------------------------------------------
// Overlap of mined pairs against a knowledge base.

enum class match_mode : std::uint8_t { verb_only, full_tuple };

struct overlap_options {
    match_mode mode = match_mode::verb_only;
    bool keep_particles = false;  // project "pack up" instead of "pack"
};

struct overlap_match {
    scored_pair mined;
    kb_pair kb;
};

struct shared_first_entry {
    std::string first_verb;
    std::string mined_second;
    std::string kb_second;
};

struct overlap_report {
    match_mode mode = match_mode::verb_only;
    std::vector<overlap_match> matched;
    std::size_t distinct_matched = 0;  // distinct projected pairs present in both
    std::size_t mined_only = 0;        // mined pairs with no KB match
    std::vector<shared_first_entry> shared_first_event;
};

namespace detail {

inline std::string project_verb(const event& e, bool keep_particles) {
    if (keep_particles && !e.particle.empty()) return e.verb + ' ' + e.particle;
    return e.verb;
}

inline std::pair<std::string, std::string> project_pair(const scored_pair& p,
                                                        const overlap_options& opt) {
    if (opt.mode == match_mode::full_tuple)
        return {canonical_form(p.e1), canonical_form(p.e2)};
    return {project_verb(p.e1, opt.keep_particles), project_verb(p.e2, opt.keep_particles)};
}

}  // namespace detail

inline overlap_report overlap(const std::vector<scored_pair>& mined, const external_kb& kb,
                              const overlap_options& opt = {}) {
    overlap_report report;
    report.mode = opt.mode;

    std::unordered_map<std::string, std::vector<std::size_t>> kb_by_pair;
    std::unordered_map<std::string, std::vector<std::size_t>> kb_by_first;
    for (std::size_t i = 0; i < kb.pairs.size(); ++i) {
        kb_by_pair[kb.pairs[i].verb1 + '\t' + kb.pairs[i].verb2].push_back(i);
        kb_by_first[kb.pairs[i].verb1].push_back(i);
    }

    std::set<std::pair<std::string, std::string>> distinct;
    std::set<std::tuple<std::string, std::string, std::string>> shared_seen;
    for (const auto& m : mined) {
        auto [p1, p2] = detail::project_pair(m, opt);
        auto it = kb_by_pair.find(p1 + '\t' + p2);
        if (it != kb_by_pair.end()) {
            for (std::size_t i : it->second) report.matched.push_back({m, kb.pairs[i]});
            distinct.emplace(p1, p2);
        } else {
            ++report.mined_only;
        }
        // first-event agreement with a different second event
        std::string first = opt.mode == match_mode::full_tuple
                                ? detail::project_verb(m.e1, opt.keep_particles)
                                : p1;
        std::string second = opt.mode == match_mode::full_tuple
                                 ? detail::project_verb(m.e2, opt.keep_particles)
                                 : p2;
        if (auto fit = kb_by_first.find(first); fit != kb_by_first.end()) {
            for (std::size_t i : fit->second) {
                if (kb.pairs[i].verb2 == second) continue;
                if (shared_seen.emplace(first, second, kb.pairs[i].verb2).second)
                    report.shared_first_event.push_back({first, second, kb.pairs[i].verb2});
            }
        }
    }
    report.distinct_matched = distinct.size();
    std::sort(report.shared_first_event.begin(), report.shared_first_event.end(),
              [](const shared_first_entry& a, const shared_first_entry& b) {
                  return std::tie(a.first_verb, a.mined_second, a.kb_second) <
                         std::tie(b.first_verb, b.mined_second, b.kb_second);
              });
    return report;
}

// Intersection of a reference list of directed verb pairs with the mined
// pairs under verb-only projection: how many reference pairs are mined.
inline std::pair<std::size_t, std::vector<std::pair<std::string, std::string>>> pairlist_overlap(
    const std::vector<scored_pair>& mined,
    const std::vector<std::pair<std::string, std::string>>& reference,
    bool keep_particles = false) {
    std::unordered_set<std::string> mined_keys;
    for (const auto& m : mined)
        mined_keys.insert(detail::project_verb(m.e1, keep_particles) + '\t' +
                          detail::project_verb(m.e2, keep_particles));
    std::vector<std::pair<std::string, std::string>> hits;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [v1, v2] : reference) {
        std::string a = to_lower(v1), b = to_lower(v2);
        if (!seen.emplace(a, b).second) continue;
        if (mined_keys.count(a + '\t' + b)) hits.emplace_back(a, b);
    }
    return {hits.size(), hits};
}

// Reference verb-pair list file: "verb1 TAB verb2" per line, "#" comments.
inline std::vector<std::pair<std::string, std::string>> load_verb_pairs(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto f = split(s, '\t');
        if (f.size() != 2 || trim(f[0]).empty() || trim(f[1]).empty())
            throw data_error("expected \"verb1 TAB verb2\"", lineno);
        out.emplace_back(to_lower(trim(f[0])), to_lower(trim(f[1])));
    }
    return out;
}

// Human-readable report with a machine-readable tab-separated tail.
inline void write_overlap_report(const overlap_report& r, const external_kb& kb,
                                 std::size_t mined_size, std::ostream& os) {
    os << "overlap report: " << mined_size << " mined pairs vs " << kb.name << " ("
       << kb.pairs.size() << " entries, mode "
       << (r.mode == match_mode::verb_only ? "verb_only" : "full_tuple") << ")\n";
    os << "pairs in both: " << r.distinct_matched << '\n';
    os << "mined only: " << r.mined_only << '\n';
    os << "shared first event, different second: " << r.shared_first_event.size() << '\n';
    os << '\n';
    for (const auto& m : r.matched)
        os << "M\t" << render_pair(m.mined) << '\t' << m.kb.verb1 << '\t' << m.kb.verb2 << '\t'
           << m.kb.relation << '\n';
    for (const auto& s : r.shared_first_event)
        os << "S\t" << s.first_verb << '\t' << s.mined_second << '\t' << s.kb_second << '\n';
}

}  // namespace cpmine
