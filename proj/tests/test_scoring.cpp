#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cpmine/counts.hpp"
#include "cpmine/scoring.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace cpmine;
using testsupport::seq_of;
using Catch::Matchers::WithinAbs;

namespace {

count_table table_of(const std::vector<event_sequence>& corpus, int max_d) {
    return count_pairs(corpus, max_d);
}

score_config cfg(int w, double alpha = 1.0, std::uint64_t min_count = 0) {
    score_config c;
    c.window = w;
    c.w_max = w;
    c.alpha = alpha;
    c.min_pair_count = min_count;
    return c;
}

}  // namespace

TEST_CASE("marginal probability from unigram counts") {
    auto t1 = table_of({seq_of("d", "A")}, 1);
    CHECK(prob_marginal(t1, "a") == 1.0);

    auto t2 = table_of({seq_of("d", "A B")}, 1);
    CHECK(prob_marginal(t2, "a") == 0.5);
    CHECK(prob_marginal(t2, "zzz") == 0.0);  // unseen event

    count_table empty(1);
    CHECK_THROWS_AS(prob_marginal(empty, "a"), usage_error);
}

TEST_CASE("ordered probability over windowed position pairs") {
    auto t = table_of({seq_of("d", "A B")}, 1);
    CHECK(ordered_prob(t, "a", "b", 1) == 1.0);
    CHECK(ordered_prob(t, "b", "a", 1) == 0.0);

    auto t2 = table_of({seq_of("d", "A B A B")}, 1);
    CHECK_THAT(ordered_prob(t2, "a", "b", 1), WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(ordered_prob(t2, "b", "a", 1), WithinAbs(1.0 / 3.0, 1e-15));

    CHECK_THROWS_AS(ordered_prob(t2, "a", "b", 5), usage_error);  // window out of range
}

TEST_CASE("pmi and scp are symmetric in their arguments") {
    auto corpus = testsupport::random_corpus(11, 20, 15, 5);
    auto t = table_of(corpus, 3);
    auto view = oracle::corpus_view::from(corpus);
    auto vocab = oracle::vocabulary(view);
    auto c = cfg(2);
    for (const auto& e1 : vocab) {
        for (const auto& e2 : vocab) {
            auto p12 = pmi(t, e1, e2, c);
            auto p21 = pmi(t, e2, e1, c);
            REQUIRE(p12.has_value() == p21.has_value());
            if (p12) CHECK(*p12 == *p21);
            auto s12 = scp(t, e1, e2, c);
            auto s21 = scp(t, e2, e1, c);
            REQUIRE(s12.has_value() == s21.has_value());
            if (s12) CHECK(*s12 == *s21);
        }
    }
}

TEST_CASE("scp is positive whenever defined") {
    auto corpus = testsupport::random_corpus(12, 25, 18, 6);
    auto t = table_of(corpus, 2);
    auto vocab = oracle::vocabulary(oracle::corpus_view::from(corpus));
    for (const auto& e1 : vocab)
        for (const auto& e2 : vocab)
            if (auto s = scp(t, e1, e2, cfg(2))) CHECK(*s > 0.0);
}

TEST_CASE("perfectly coupled corpus: scores match the brute-force values") {
    // 10 documents, each just [A, B]
    std::vector<event_sequence> corpus;
    for (int i = 0; i < 10; ++i) corpus.push_back(seq_of("d" + std::to_string(i), "A B"));
    auto t = table_of(corpus, 1);
    auto view = oracle::corpus_view::from(corpus);
    auto c = cfg(1);

    auto s = scp(t, "a", "b", c);
    REQUIRE(s);
    CHECK_THAT(*s, WithinAbs(*oracle::scp(view, "a", "b", 1, 0), 1e-12));
    // joint probability is 1, both marginals 1/2
    CHECK_THAT(*s, WithinAbs(4.0, 1e-12));

    auto p = pmi(t, "a", "b", c);
    REQUIRE(p);
    CHECK_THAT(*p, WithinAbs(std::log(4.0), 1e-12));

    // alpha=0 with no reverse observations: cp is absent
    CHECK_FALSE(cp(t, "a", "b", cfg(1, 0.0)));
    // smoothed cp exists
    CHECK(cp(t, "a", "b", cfg(1, 1.0)));
}

TEST_CASE("pmi is near zero on a large independent corpus") {
    // one long uniform document; adjacent events are independent draws
    rng_engine rng(20240800);
    event_sequence seq;
    seq.doc_id = "big";
    seq.genre = "synthetic";
    for (int i = 0; i < 200000; ++i) {
        event e;
        e.verb = "v" + std::to_string(bounded(rng, 4));
        seq.events.push_back(std::move(e));
    }
    auto t = table_of({seq}, 1);
    // the joint sums both ordered directions over ordered position pairs,
    // which places every independent pair at log 2 rather than 0; the
    // independence signal is that all pairs share that common baseline
    std::vector<double> values;
    for (const char* a : {"v0", "v1", "v2", "v3"}) {
        for (const char* b : {"v0", "v1", "v2", "v3"}) {
            auto p = pmi(t, a, b, cfg(1));
            REQUIRE(p);
            CHECK_THAT(*p, WithinAbs(std::log(2.0), 0.05));
            values.push_back(*p);
        }
    }
    for (double v : values) CHECK_THAT(v - values.front(), WithinAbs(0.0, 0.05));
}

TEST_CASE("cp equals pmi when ordered counts balance") {
    // A B ... B A gives one pair in each direction
    auto t = table_of({seq_of("d1", "A B"), seq_of("d2", "B A")}, 1);
    auto c = cfg(1, 1.0);
    auto v_cp = cp(t, "a", "b", c);
    auto v_pmi = pmi(t, "a", "b", c);
    REQUIRE(v_cp);
    REQUIRE(v_pmi);
    CHECK(*v_cp == *v_pmi);  // log(2/2) contributes exactly zero
}

TEST_CASE("cp ordering terms cancel: cp(a,b) + cp(b,a) = 2 pmi(a,b)") {
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        auto corpus = testsupport::random_corpus(seed, 15, 20, 4);
        auto t = table_of(corpus, 3);
        auto vocab = oracle::vocabulary(oracle::corpus_view::from(corpus));
        auto c = cfg(2, 0.0);
        for (const auto& e1 : vocab) {
            for (const auto& e2 : vocab) {
                auto fwd = cp(t, e1, e2, c);
                auto rev = cp(t, e2, e1, c);
                if (!fwd || !rev) continue;  // needs both orders observed
                auto p = pmi(t, e1, e2, c);
                REQUIRE(p);
                CHECK_THAT(*fwd + *rev, WithinAbs(2.0 * *p, 1e-12));
            }
        }
    }
}

TEST_CASE("cp_variant with w_max=1 equals cp with window 1") {
    auto corpus = testsupport::random_corpus(313, 20, 15, 5);
    auto t = table_of(corpus, 3);
    auto vocab = oracle::vocabulary(oracle::corpus_view::from(corpus));
    score_config c = cfg(1, 1.0);
    c.w_max = 1;
    for (const auto& e1 : vocab) {
        for (const auto& e2 : vocab) {
            auto variant = cp_variant(t, e1, e2, c);
            auto plain = cp(t, e1, e2, c);
            REQUIRE(variant.has_value() == plain.has_value());
            if (variant) CHECK(variant->value == *plain);
        }
    }
}

TEST_CASE("cp_variant sums a constant term into a harmonic multiple") {
    // crafted table: identical cp at every window
    std::string text =
        "count_table v1\n"
        "genre\tcrafted\n"
        "max_distance\t3\n"
        "total_events\t1000\n"
        "pairs_at_distance\t1\t100\n"
        "pairs_at_distance\t2\t100\n"
        "pairs_at_distance\t3\t100\n"
        "U a 50\nU b 50\nU filler 900\n"
        "P 1 a\tb 10\nP 1 b\ta 10\nP 1 filler\tfiller 80\n"
        "P 2 a\tb 10\nP 2 b\ta 10\nP 2 filler\tfiller 80\n"
        "P 3 a\tb 10\nP 3 b\ta 10\nP 3 filler\tfiller 80\n";
    std::istringstream in(text);
    auto t = count_table::load(in);

    score_config c = cfg(1, 1.0);
    c.w_max = 3;
    auto r = cp_variant(t, "a", "b", c);
    REQUIRE(r);
    CHECK(r->defined_terms == 3);
    CHECK(r->absent_terms == 0);

    // every window: joint = 0.2, marginals 0.05 each, balanced ordering
    double term = std::log(0.2 / (0.05 * 0.05));
    CHECK_THAT(r->value, WithinAbs(term * (1.0 + 0.5 + 1.0 / 3.0), 1e-12));
}

TEST_CASE("min_pair_count suppresses rare pairs") {
    auto t = table_of({seq_of("d", "A B C")}, 1);  // each adjacent pair seen once
    CHECK_FALSE(pmi(t, "a", "b", cfg(1, 1.0, 2)));
    CHECK(pmi(t, "a", "b", cfg(1, 1.0, 1)));
    CHECK(pmi(t, "a", "b", cfg(1, 1.0, 0)));
    CHECK_FALSE(scp(t, "a", "c", cfg(1, 1.0, 0)));  // never co-occur at distance 1
}

TEST_CASE("unsmoothed cp needs both ordered counts") {
    auto t = table_of({seq_of("d", "A B A B")}, 2);
    CHECK(cp(t, "a", "b", cfg(1, 0.0)));        // both directions seen adjacently
    CHECK_FALSE(cp(t, "a", "a", cfg(1, 0.0)));  // (a,a) unseen at distance 1
    CHECK(cp(t, "a", "a", cfg(2, 0.0)));        // seen at distance 2
}

TEST_CASE("scores match the brute-force oracle on random corpora") {
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
        auto corpus = testsupport::random_corpus(seed, 12, 18, 5);
        auto view = oracle::corpus_view::from(corpus);
        int max_d = 1 + static_cast<int>(seed % 4);
        auto t = table_of(corpus, max_d);
        auto vocab = oracle::vocabulary(view);

        int w = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(max_d));
        double alpha = (seed % 3 == 0) ? 0.0 : 1.0;
        std::uint64_t min_count = seed % 3;
        score_config c = cfg(w, alpha, min_count);
        c.w_max = w;
        if (seed % 2) c.variant_windows = window_mode::exact;
        bool exact = c.variant_windows == window_mode::exact;

        for (const auto& e1 : vocab) {
            for (const auto& e2 : vocab) {
                auto p = pmi(t, e1, e2, c);
                auto op = oracle::pmi(view, e1, e2, w, min_count);
                REQUIRE(p.has_value() == op.has_value());
                if (p) CHECK_THAT(*p, WithinAbs(*op, 1e-9));

                auto s = scp(t, e1, e2, c);
                auto os = oracle::scp(view, e1, e2, w, min_count);
                REQUIRE(s.has_value() == os.has_value());
                if (s) CHECK_THAT(*s, WithinAbs(*os, 1e-9));

                auto v = cp(t, e1, e2, c);
                auto ov = oracle::cp(view, e1, e2, w, alpha, min_count);
                REQUIRE(v.has_value() == ov.has_value());
                if (v) CHECK_THAT(*v, WithinAbs(*ov, 1e-9));

                auto cv = cp_variant(t, e1, e2, c);
                auto ocv = oracle::cp_variant(view, e1, e2, w, alpha, min_count, exact);
                REQUIRE(cv.has_value() == ocv.has_value());
                if (cv) CHECK_THAT(cv->value, WithinAbs(*ocv, 1e-9));
            }
        }
    }
}

TEST_CASE("k-fold corpus duplication leaves unsmoothed scores unchanged") {
    auto corpus = testsupport::random_corpus(901, 10, 15, 4);
    auto base = table_of(corpus, 2);
    auto vocab = oracle::vocabulary(oracle::corpus_view::from(corpus));
    score_config c = cfg(2, 0.0, 1);

    for (int k : {2, 5}) {
        std::vector<event_sequence> duplicated;
        for (int copy = 0; copy < k; ++copy)
            for (auto seq : corpus) {
                seq.doc_id += "+" + std::to_string(copy);
                duplicated.push_back(std::move(seq));
            }
        auto big = table_of(duplicated, 2);
        for (const auto& e1 : vocab) {
            for (const auto& e2 : vocab) {
                auto before = pmi(base, e1, e2, c);
                if (!before) continue;
                auto after = pmi(big, e1, e2, c);
                REQUIRE(after);
                CHECK_THAT(*after, WithinAbs(*before, 1e-9));

                auto cp_before = cp(base, e1, e2, c);
                if (cp_before) {
                    auto cp_after = cp(big, e1, e2, c);
                    REQUIRE(cp_after);
                    CHECK_THAT(*cp_after, WithinAbs(*cp_before, 1e-9));
                }
            }
        }
    }
}

TEST_CASE("one more forward observation strictly raises cp") {
    // identical tables except pair (a,b) has one extra observation at d=1
    auto make = [](int bump) {
        std::ostringstream text;
        text << "count_table v1\ngenre\t\nmax_distance\t1\ntotal_events\t100\n"
             << "pairs_at_distance\t1\t" << (90 + bump) << "\n"
             << "U a 20\nU b 30\nU c 50\n"
             << "P 1 a\tb " << (5 + bump) << "\nP 1 b\ta 3\nP 1 c\tc " << 82 << "\n";
        std::istringstream in(text.str());
        return count_table::load(in);
    };
    auto c = cfg(1, 1.0);
    for (int bump = 0; bump < 4; ++bump) {
        auto lo = cp(make(bump), "a", "b", c);
        auto hi = cp(make(bump + 1), "a", "b", c);
        REQUIRE(lo);
        REQUIRE(hi);
        CHECK(*hi > *lo);
    }
}
