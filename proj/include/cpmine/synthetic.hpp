#pragma once

// Synthetic event corpora with planted antecedent/consequent pairs.
// Background events are drawn uniformly from the vocabulary; after a
// planted antecedent is emitted, its consequent is scheduled at a random
// offset within the gap with the configured probability.  Generation is
// fully determined by the seed.  Recovery of the planted pairs from a
// ranked list stands in for judgments no program can make.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpmine/event.hpp"
#include "cpmine/ranking.hpp"
#include "cpmine/rng.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

struct planted_pair {
    event antecedent;
    event consequent;
    double boost = 1.0;  // probability the consequent is scheduled, in [0, 1]
};

struct generator_spec {
    int vocab_size = 0;
    std::vector<planted_pair> planted;
    int gap = 1;  // consequent lands 1..gap positions after the antecedent
    int docs = 0;
    int len_min = 1, len_max = 1;  // uniform document length
    std::uint64_t seed = 0;
    std::string genre = "synthetic";
};

// Vocabulary events are verb-only tuples ev0000, ev0001, ...
inline event vocab_event(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ev%04d", i);
    event e;
    e.verb = buf;
    return e;
}

inline void validate(const generator_spec& spec) {
    if (spec.vocab_size < 1) throw usage_error("vocab_size must be >= 1");
    if (spec.gap < 1) throw usage_error("gap must be >= 1");
    if (spec.docs < 0) throw usage_error("docs must be >= 0");
    if (spec.len_min < 1 || spec.len_max < spec.len_min)
        throw usage_error("document length range is invalid");
    std::set<std::string> vocab;
    for (int i = 0; i < spec.vocab_size; ++i) vocab.insert(canonical_form(vocab_event(i)));
    for (const auto& p : spec.planted) {
        if (p.boost < 0.0 || p.boost > 1.0) throw usage_error("boost must be in [0, 1]");
        if (!vocab.count(canonical_form(p.antecedent)) || !vocab.count(canonical_form(p.consequent)))
            throw usage_error("planted pair " + canonical_form(p.antecedent) + " -> " +
                              canonical_form(p.consequent) + " is outside the vocabulary");
    }
}

inline std::vector<event_sequence> generate_corpus(const generator_spec& spec) {
    validate(spec);
    rng_engine rng(spec.seed);

    std::vector<event> vocab;
    vocab.reserve(static_cast<std::size_t>(spec.vocab_size));
    for (int i = 0; i < spec.vocab_size; ++i) vocab.push_back(vocab_event(i));

    int id_width = 1;
    for (int n = spec.docs > 0 ? spec.docs - 1 : 0; n >= 10; n /= 10) ++id_width;
    if (id_width > 10) id_width = 10;

    std::vector<event_sequence> corpus;
    corpus.reserve(static_cast<std::size_t>(spec.docs));
    for (int doc = 0; doc < spec.docs; ++doc) {
        int len = spec.len_min +
                  static_cast<int>(bounded(rng, static_cast<std::uint64_t>(spec.len_max -
                                                                           spec.len_min + 1)));
        event_sequence seq;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "synth-%0*d", id_width, doc);
        seq.doc_id = buf;
        seq.genre = spec.genre;
        seq.events.reserve(static_cast<std::size_t>(len));

        struct scheduled {
            int due;
            const event* what;
        };
        std::vector<scheduled> pending;  // emission order: earliest scheduled first

        for (int pos = 0; pos < len; ++pos) {
            const event* emit = nullptr;
            for (std::size_t i = 0; i < pending.size(); ++i) {
                if (pending[i].due <= pos) {
                    emit = pending[i].what;
                    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
            if (!emit) emit = &vocab[bounded(rng, vocab.size())];
            seq.events.push_back(*emit);

            for (const auto& p : spec.planted) {
                if (!(p.antecedent == *emit)) continue;
                if (uniform01(rng) < p.boost) {
                    int due = pos + 1 + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(spec.gap)));
                    if (due < len) pending.push_back({due, &p.consequent});
                }
            }
        }
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Recovery of planted pairs from a ranked list.

struct recovery_at_k {
    std::size_t k = 0;
    std::optional<double> precision;  // absent for k = 0
    double recall = 0.0;
};

struct recovery_report {
    std::vector<recovery_at_k> at;
    // 1-based rank of each planted pair in the ranked list, absent if unranked
    std::vector<std::optional<std::size_t>> planted_ranks;
};

inline recovery_report evaluate_recovery(const std::vector<planted_pair>& planted,
                                         const std::vector<scored_pair>& ranked,
                                         const std::vector<std::size_t>& ks) {
    recovery_report report;
    std::vector<std::string> keys;
    keys.reserve(planted.size());
    for (const auto& p : planted)
        keys.push_back(canonical_form(p.antecedent) + '\t' + canonical_form(p.consequent));

    report.planted_ranks.assign(planted.size(), std::nullopt);
    std::vector<std::size_t> hit_rank;  // ranks (1-based) that hit a planted pair
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        std::string key = canonical_form(ranked[r].e1) + '\t' + canonical_form(ranked[r].e2);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i] == key && !report.planted_ranks[i]) {
                report.planted_ranks[i] = r + 1;
                hit_rank.push_back(r + 1);
            }
        }
    }
    std::sort(hit_rank.begin(), hit_rank.end());

    for (std::size_t k : ks) {
        recovery_at_k row;
        row.k = k;
        auto hits = static_cast<std::size_t>(
            std::upper_bound(hit_rank.begin(), hit_rank.end(), k) - hit_rank.begin());
        if (k > 0) row.precision = static_cast<double>(hits) / static_cast<double>(k);
        row.recall = planted.empty() ? 0.0
                                     : static_cast<double>(hits) / static_cast<double>(planted.size());
        report.at.push_back(row);
    }
    return report;
}

inline void write_recovery_report(const recovery_report& r,
                                  const std::vector<planted_pair>& planted, std::ostream& os) {
    os << "planted-pair recovery\n";
    os << "k\tprecision\trecall\n";
    for (const auto& row : r.at)
        os << row.k << '\t' << (row.precision ? format_double(*row.precision) : "-") << '\t'
           << format_double(row.recall) << '\n';
    os << '\n';
    for (std::size_t i = 0; i < planted.size(); ++i) {
        os << "R\t" << canonical_form(planted[i].antecedent) << " -> "
           << canonical_form(planted[i].consequent) << '\t';
        if (r.planted_ranks[i])
            os << *r.planted_ranks[i] << '\n';
        else
            os << "-\n";
    }
}

// ---------------------------------------------------------------------------
// Spec file: "key = value" lines with "#" comments.  Planted pairs are
// repeatable:  planted = <event> -> <event> @ <boost>

inline generator_spec load_generator_spec(std::istream& is) {
    generator_spec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string_view::npos) throw data_error("expected key = value", lineno);
        std::string key(trim(s.substr(0, eq)));
        std::string_view value = trim(s.substr(eq + 1));

        auto as_int = [&](int& out) {
            if (!parse_i32(value, out)) throw data_error("bad integer for " + key, lineno);
        };
        if (key == "vocab_size") as_int(spec.vocab_size);
        else if (key == "gap") as_int(spec.gap);
        else if (key == "docs") as_int(spec.docs);
        else if (key == "len_min") as_int(spec.len_min);
        else if (key == "len_max") as_int(spec.len_max);
        else if (key == "seed") {
            if (!parse_u64(value, spec.seed)) throw data_error("bad seed", lineno);
        } else if (key == "genre") {
            spec.genre = std::string(value);
        } else if (key == "planted") {
            std::size_t arrow = value.find("->");
            std::size_t at = value.rfind('@');
            if (arrow == std::string_view::npos || at == std::string_view::npos || at < arrow)
                throw data_error("expected planted = a -> b @ boost", lineno);
            planted_pair p;
            p.antecedent = parse_canonical(trim(value.substr(0, arrow)), lineno);
            p.consequent = parse_canonical(trim(value.substr(arrow + 2, at - arrow - 2)), lineno);
            if (!parse_double(trim(value.substr(at + 1)), p.boost))
                throw data_error("bad boost value", lineno);
            spec.planted.push_back(std::move(p));
        } else {
            throw data_error("unknown spec key \"" + key + "\"", lineno);
        }
    }
    return spec;
}

// Planted ground-truth file: "canonical_a TAB canonical_b TAB boost".
inline void save_planted(const std::vector<planted_pair>& planted, std::ostream& os) {
    for (const auto& p : planted)
        os << canonical_form(p.antecedent) << '\t' << canonical_form(p.consequent) << '\t'
           << format_double(p.boost) << '\n';
}

inline std::vector<planted_pair> load_planted(std::istream& is) {
    std::vector<planted_pair> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, '\t');
        if (f.size() != 3) throw data_error("expected 3 tab-separated fields", lineno);
        planted_pair p;
        p.antecedent = parse_canonical(f[0], lineno);
        p.consequent = parse_canonical(f[1], lineno);
        if (!parse_double(f[2], p.boost)) throw data_error("bad boost field", lineno);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace cpmine
