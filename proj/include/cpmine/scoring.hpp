#pragma once

// Association scores over a count_table.
//
// Marginals come from unigram frequencies; ordered pair probabilities
// from windowed pair counts over total windowed position pairs; the
// joint is the sum of both ordered directions.  Natural log throughout.
//
//   pmi(e1,e2)  = log P(e1,e2) / (P(e1) P(e2))
//   scp(e1,e2)  = [P(e1,e2)/P(e1)] * [P(e1,e2)/P(e2)]
//   cp(e1,e2)   = pmi(e1,e2) + log (n(e1->e2)+alpha) / (n(e2->e1)+alpha)
//   cp_variant  = sum_{i=1..w_max} cp_i(e1,e2) / i
//
// where cp_i uses window i (distance <= i by default; exactly i under
// the exact window semantics).  Pairs whose unordered joint count within
// the window falls below min_pair_count get no score; undefined scores
// are reported as absent rather than infinities.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cpmine/counts.hpp"
#include "cpmine/event.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

enum class scorer_kind : std::uint8_t { pmi, scp, cp, cp_variant };

enum class window_mode : std::uint8_t { cumulative, exact };

inline const char* to_string(scorer_kind k) {
    switch (k) {
        case scorer_kind::pmi: return "pmi";
        case scorer_kind::scp: return "scp";
        case scorer_kind::cp: return "cp";
        case scorer_kind::cp_variant: return "cp_variant";
    }
    return "?";
}

inline std::optional<scorer_kind> scorer_from_string(std::string_view s) {
    if (s == "pmi") return scorer_kind::pmi;
    if (s == "scp") return scorer_kind::scp;
    if (s == "cp") return scorer_kind::cp;
    if (s == "cp_variant") return scorer_kind::cp_variant;
    return std::nullopt;
}

struct score_config {
    int window = 1;                // w for pmi/scp/cp
    int w_max = 1;                 // outer bound for cp_variant
    double alpha = 1.0;            // add-alpha smoothing of the ordering ratio
    std::uint64_t min_pair_count = 2;  // unordered joint threshold for scoring
    window_mode variant_windows = window_mode::cumulative;

    void validate_against(const count_table& t, scorer_kind kind) const {
        int w = kind == scorer_kind::cp_variant ? w_max : window;
        if (w < 1 || w > t.max_distance())
            throw usage_error("window " + std::to_string(w) + " out of range 1.." +
                              std::to_string(t.max_distance()));
        if (alpha < 0) throw usage_error("alpha must be >= 0");
    }
};

inline double prob_marginal(const count_table& t, std::string_view canonical) {
    if (t.total_events() == 0) throw usage_error("empty count table");
    return static_cast<double>(t.event_count(canonical)) / static_cast<double>(t.total_events());
}

inline double prob_marginal(const count_table& t, const event& e) {
    return prob_marginal(t, canonical_form(e));
}

inline double ordered_prob(const count_table& t, std::string_view c1, std::string_view c2, int w) {
    std::uint64_t denom = t.pairs_within(w);
    if (denom == 0) throw usage_error("no position pairs within window");
    return static_cast<double>(t.pair_count_within(c1, c2, w)) / static_cast<double>(denom);
}

inline double ordered_prob(const count_table& t, const event& e1, const event& e2, int w) {
    return ordered_prob(t, canonical_form(e1), canonical_form(e2), w);
}

namespace detail {

// Windowed evidence for one ordered pair; the basis of every score.
struct pair_window {
    std::uint64_t n12 = 0, n21 = 0;  // ordered counts within the window
    std::uint64_t n1 = 0, n2 = 0;    // unigram counts
    std::uint64_t denom = 0;         // total position pairs in the window
    std::uint64_t total_events = 0;

    std::uint64_t joint() const { return n12 + n21; }
};

inline pair_window gather(const count_table& t, count_table::event_id a, count_table::event_id b,
                          int w, window_mode mode) {
    pair_window pw;
    pw.n1 = t.event_count(a);
    pw.n2 = t.event_count(b);
    pw.total_events = t.total_events();
    if (mode == window_mode::cumulative) {
        pw.n12 = t.pair_count_within(a, b, w);
        pw.n21 = t.pair_count_within(b, a, w);
        pw.denom = t.pairs_within(w);
    } else {
        pw.n12 = t.pair_count_at(a, b, w);
        pw.n21 = t.pair_count_at(b, a, w);
        pw.denom = t.pairs_at_distance(w);
    }
    return pw;
}

inline pair_window gather(const count_table& t, std::string_view c1, std::string_view c2, int w,
                          window_mode mode) {
    auto a = t.find(c1);
    auto b = t.find(c2);
    pair_window pw;
    pw.total_events = t.total_events();
    pw.denom = mode == window_mode::cumulative ? t.pairs_within(w) : t.pairs_at_distance(w);
    if (a) pw.n1 = t.event_count(*a);
    if (b) pw.n2 = t.event_count(*b);
    if (a && b) {
        if (mode == window_mode::cumulative) {
            pw.n12 = t.pair_count_within(*a, *b, w);
            pw.n21 = t.pair_count_within(*b, *a, w);
        } else {
            pw.n12 = t.pair_count_at(*a, *b, w);
            pw.n21 = t.pair_count_at(*b, *a, w);
        }
    }
    return pw;
}

inline bool scoreable(const pair_window& pw, std::uint64_t min_pair_count) {
    if (pw.total_events == 0 || pw.denom == 0) return false;
    if (pw.n1 == 0 || pw.n2 == 0) return false;
    std::uint64_t threshold = min_pair_count > 0 ? min_pair_count : 1;
    return pw.joint() >= threshold;
}

inline double pmi_value(const pair_window& pw) {
    double joint = static_cast<double>(pw.joint()) / static_cast<double>(pw.denom);
    double p1 = static_cast<double>(pw.n1) / static_cast<double>(pw.total_events);
    double p2 = static_cast<double>(pw.n2) / static_cast<double>(pw.total_events);
    return std::log(joint / (p1 * p2));
}

inline double scp_value(const pair_window& pw) {
    double joint = static_cast<double>(pw.joint()) / static_cast<double>(pw.denom);
    double p1 = static_cast<double>(pw.n1) / static_cast<double>(pw.total_events);
    double p2 = static_cast<double>(pw.n2) / static_cast<double>(pw.total_events);
    return (joint / p1) * (joint / p2);
}

inline std::optional<double> cp_value(const pair_window& pw, double alpha) {
    double fwd = static_cast<double>(pw.n12) + alpha;
    double rev = static_cast<double>(pw.n21) + alpha;
    if (fwd <= 0.0 || rev <= 0.0) return std::nullopt;
    return pmi_value(pw) + std::log(fwd / rev);
}

}  // namespace detail

struct cp_variant_result {
    double value = 0.0;
    int defined_terms = 0;
    int absent_terms = 0;  // windows whose cp term was undefined and contributed 0
};

// The four scorers.  A nullopt means the score is undefined for this pair
// under the given config (below min_pair_count, zero marginal, or an
// unsmoothed zero ordered count).

inline std::optional<double> pmi(const count_table& t, std::string_view c1, std::string_view c2,
                                 const score_config& cfg) {
    cfg.validate_against(t, scorer_kind::pmi);
    auto pw = detail::gather(t, c1, c2, cfg.window, window_mode::cumulative);
    if (!detail::scoreable(pw, cfg.min_pair_count)) return std::nullopt;
    return detail::pmi_value(pw);
}

inline std::optional<double> scp(const count_table& t, std::string_view c1, std::string_view c2,
                                 const score_config& cfg) {
    cfg.validate_against(t, scorer_kind::scp);
    auto pw = detail::gather(t, c1, c2, cfg.window, window_mode::cumulative);
    if (!detail::scoreable(pw, cfg.min_pair_count)) return std::nullopt;
    return detail::scp_value(pw);
}

inline std::optional<double> cp(const count_table& t, std::string_view c1, std::string_view c2,
                                const score_config& cfg) {
    cfg.validate_against(t, scorer_kind::cp);
    auto pw = detail::gather(t, c1, c2, cfg.window, window_mode::cumulative);
    if (!detail::scoreable(pw, cfg.min_pair_count)) return std::nullopt;
    return detail::cp_value(pw, cfg.alpha);
}

inline std::optional<cp_variant_result> cp_variant(const count_table& t, std::string_view c1,
                                                   std::string_view c2, const score_config& cfg) {
    cfg.validate_against(t, scorer_kind::cp_variant);
    cp_variant_result r;
    for (int i = 1; i <= cfg.w_max; ++i) {
        auto pw = detail::gather(t, c1, c2, i, cfg.variant_windows);
        std::optional<double> term;
        if (detail::scoreable(pw, cfg.min_pair_count)) term = detail::cp_value(pw, cfg.alpha);
        if (term) {
            r.value += *term / static_cast<double>(i);
            ++r.defined_terms;
        } else {
            ++r.absent_terms;
        }
    }
    if (r.defined_terms == 0) return std::nullopt;
    return r;
}

// Uniform dispatcher; cp_variant collapses to its summed value.
inline std::optional<double> score(const count_table& t, std::string_view c1, std::string_view c2,
                                   const score_config& cfg, scorer_kind kind) {
    switch (kind) {
        case scorer_kind::pmi: return pmi(t, c1, c2, cfg);
        case scorer_kind::scp: return scp(t, c1, c2, cfg);
        case scorer_kind::cp: return cp(t, c1, c2, cfg);
        case scorer_kind::cp_variant: {
            auto r = cp_variant(t, c1, c2, cfg);
            if (!r) return std::nullopt;
            return r->value;
        }
    }
    return std::nullopt;
}

inline std::optional<double> pmi(const count_table& t, const event& e1, const event& e2,
                                 const score_config& cfg) {
    return pmi(t, canonical_form(e1), canonical_form(e2), cfg);
}
inline std::optional<double> scp(const count_table& t, const event& e1, const event& e2,
                                 const score_config& cfg) {
    return scp(t, canonical_form(e1), canonical_form(e2), cfg);
}
inline std::optional<double> cp(const count_table& t, const event& e1, const event& e2,
                                const score_config& cfg) {
    return cp(t, canonical_form(e1), canonical_form(e2), cfg);
}
inline std::optional<cp_variant_result> cp_variant(const count_table& t, const event& e1,
                                                   const event& e2, const score_config& cfg) {
    return cp_variant(t, canonical_form(e1), canonical_form(e2), cfg);
}
inline std::optional<double> score(const count_table& t, const event& e1, const event& e2,
                                   const score_config& cfg, scorer_kind kind) {
    return score(t, canonical_form(e1), canonical_form(e2), cfg, kind);
}

// id-keyed path for ranking loops
inline std::optional<double> score_ids(const count_table& t, count_table::event_id a,
                                       count_table::event_id b, const score_config& cfg,
                                       scorer_kind kind) {
    cfg.validate_against(t, kind);
    if (kind == scorer_kind::cp_variant) {
        cp_variant_result r;
        for (int i = 1; i <= cfg.w_max; ++i) {
            auto pw = detail::gather(t, a, b, i, cfg.variant_windows);
            std::optional<double> term;
            if (detail::scoreable(pw, cfg.min_pair_count)) term = detail::cp_value(pw, cfg.alpha);
            if (term) {
                r.value += *term / static_cast<double>(i);
                ++r.defined_terms;
            } else {
                ++r.absent_terms;
            }
        }
        if (r.defined_terms == 0) return std::nullopt;
        return r.value;
    }
    auto pw = detail::gather(t, a, b, cfg.window, window_mode::cumulative);
    if (!detail::scoreable(pw, cfg.min_pair_count)) return std::nullopt;
    switch (kind) {
        case scorer_kind::pmi: return detail::pmi_value(pw);
        case scorer_kind::scp: return detail::scp_value(pw);
        case scorer_kind::cp: return detail::cp_value(pw, cfg.alpha);
        default: return std::nullopt;
    }
}

}  // namespace cpmine
