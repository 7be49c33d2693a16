#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpmine/counts.hpp"
#include "cpmine/ranking.hpp"
#include "cpmine/synthetic.hpp"
#include "support.hpp"

using namespace cpmine;

namespace {

generator_spec base_spec() {
    generator_spec spec;
    spec.vocab_size = 20;
    spec.gap = 2;
    spec.docs = 200;
    spec.len_min = 10;
    spec.len_max = 14;
    spec.seed = 1234;
    return spec;
}

std::string corpus_bytes(const std::vector<event_sequence>& corpus) {
    std::ostringstream out;
    save_event_stream(corpus, out);
    return out.str();
}

std::size_t count_occurrences(const std::vector<event_sequence>& corpus, const event& e) {
    std::size_t n = 0;
    for (const auto& seq : corpus)
        for (const auto& x : seq.events)
            if (x == e) ++n;
    return n;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
    auto spec = base_spec();
    spec.planted.push_back({vocab_event(0), vocab_event(1), 0.7});
    auto a = generate_corpus(spec);
    auto b = generate_corpus(spec);
    CHECK(corpus_bytes(a) == corpus_bytes(b));

    spec.seed = 4321;
    auto c = generate_corpus(spec);
    CHECK(corpus_bytes(a) != corpus_bytes(c));
}

TEST_CASE("zero documents give an empty corpus") {
    auto spec = base_spec();
    spec.docs = 0;
    CHECK(generate_corpus(spec).empty());
}

TEST_CASE("spec validation rejects out-of-vocabulary plants and bad ranges") {
    auto spec = base_spec();
    spec.planted.push_back({vocab_event(0), vocab_event(99), 0.5});
    CHECK_THROWS_AS(generate_corpus(spec), usage_error);

    auto bad_boost = base_spec();
    bad_boost.planted.push_back({vocab_event(0), vocab_event(1), 1.5});
    CHECK_THROWS_AS(generate_corpus(bad_boost), usage_error);

    auto neg_boost = base_spec();
    neg_boost.planted.push_back({vocab_event(0), vocab_event(1), -0.1});
    CHECK_THROWS_AS(generate_corpus(neg_boost), usage_error);

    auto bad_len = base_spec();
    bad_len.len_max = bad_len.len_min - 1;
    CHECK_THROWS_AS(generate_corpus(bad_len), usage_error);
}

TEST_CASE("boost one with gap one forces immediate consequents") {
    auto spec = base_spec();
    spec.gap = 1;
    spec.planted.push_back({vocab_event(2), vocab_event(3), 1.0});
    auto corpus = generate_corpus(spec);

    const event a = vocab_event(2), b = vocab_event(3);
    std::size_t a_count = 0;
    for (const auto& seq : corpus) {
        for (std::size_t i = 0; i < seq.events.size(); ++i) {
            if (seq.events[i] == a && i + 1 < seq.events.size()) {
                ++a_count;
                CHECK(seq.events[i + 1] == b);
            }
        }
    }
    CHECK(a_count > 50);  // the pattern actually occurred often
}

TEST_CASE("boost zero leaves the planted pair at chance rate") {
    auto spec = base_spec();
    spec.docs = 400;
    spec.planted.push_back({vocab_event(0), vocab_event(1), 0.0});
    auto corpus = generate_corpus(spec);

    // adjacent-following rate of (ev0, ev1) should be near 1/vocab
    std::size_t a_total = 0, ab_adjacent = 0;
    for (const auto& seq : corpus) {
        for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
            if (seq.events[i] == vocab_event(0)) {
                ++a_total;
                if (seq.events[i + 1] == vocab_event(1)) ++ab_adjacent;
            }
        }
    }
    REQUIRE(a_total > 100);
    double rate = static_cast<double>(ab_adjacent) / static_cast<double>(a_total);
    double p = 1.0 / 20.0;
    double sigma = std::sqrt(p * (1 - p) / static_cast<double>(a_total));
    CHECK(rate <= p + 3 * sigma);
    CHECK(rate >= std::max(0.0, p - 3 * sigma));
}

TEST_CASE("planted consequents are boosted above chance") {
    auto spec = base_spec();
    spec.docs = 400;
    spec.planted.push_back({vocab_event(0), vocab_event(1), 0.8});
    auto corpus = generate_corpus(spec);

    std::size_t a_total = 0, b_follows = 0;
    for (const auto& seq : corpus) {
        for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
            if (seq.events[i] == vocab_event(0)) {
                ++a_total;
                bool hit = false;
                for (std::size_t j = i + 1; j < seq.events.size() && j <= i + 2; ++j)
                    hit |= seq.events[j] == vocab_event(1);
                b_follows += hit;
            }
        }
    }
    REQUIRE(a_total > 100);
    double rate = static_cast<double>(b_follows) / static_cast<double>(a_total);
    CHECK(rate > 0.6);  // 0.8 boost minus end-of-document and collision losses
}

TEST_CASE("order sensitivity: cp prefers the planted direction") {
    auto spec = base_spec();
    spec.docs = 500;
    spec.planted.push_back({vocab_event(4), vocab_event(5), 1.0});
    auto corpus = generate_corpus(spec);
    auto table = count_pairs(corpus, 3);

    score_config c;
    c.window = 3;
    c.alpha = 1.0;
    c.min_pair_count = 1;
    auto fwd = cp(table, vocab_event(4), vocab_event(5), c);
    auto rev = cp(table, vocab_event(5), vocab_event(4), c);
    REQUIRE(fwd);
    REQUIRE(rev);
    CHECK(*fwd > *rev);
}

TEST_CASE("raising the boost never hurts the planted pair's median rank") {
    auto median_rank = [](double boost) {
        std::vector<double> ranks;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            generator_spec spec;
            spec.vocab_size = 12;
            spec.gap = 2;
            spec.docs = 120;
            spec.len_min = 12;
            spec.len_max = 12;
            spec.seed = seed;
            spec.planted.push_back({vocab_event(0), vocab_event(1), boost});
            auto corpus = generate_corpus(spec);
            auto table = count_pairs(corpus, 3);
            score_config c;
            c.window = 3;
            c.alpha = 1.0;
            c.min_pair_count = 2;
            auto ranked = rank_pairs(table, c, scorer_kind::cp);
            auto report = evaluate_recovery({{vocab_event(0), vocab_event(1), boost}}, ranked,
                                            {10});
            REQUIRE(report.planted_ranks.size() == 1);
            REQUIRE(report.planted_ranks[0].has_value());
            ranks.push_back(static_cast<double>(*report.planted_ranks[0]));
        }
        std::sort(ranks.begin(), ranks.end());
        return (ranks[4] + ranks[5]) / 2.0;
    };

    double r_low = median_rank(0.2);
    double r_mid = median_rank(0.5);
    double r_high = median_rank(0.9);
    CHECK(r_mid <= r_low);
    CHECK(r_high <= r_mid);
}

TEST_CASE("recovery report slices precision and recall at k") {
    std::vector<planted_pair> planted{{vocab_event(0), vocab_event(1), 1.0},
                                      {vocab_event(2), vocab_event(3), 1.0}};
    std::vector<scored_pair> ranked;
    auto push = [&](int a, int b, double s) {
        scored_pair p;
        p.e1 = vocab_event(a);
        p.e2 = vocab_event(b);
        p.score = s;
        ranked.push_back(p);
    };
    push(0, 1, 5.0);  // planted
    push(7, 8, 4.0);
    push(2, 3, 3.0);  // planted
    push(9, 9, 2.0);

    auto report = evaluate_recovery(planted, ranked, {0, 1, 3, 10});
    REQUIRE(report.at.size() == 4);
    CHECK_FALSE(report.at[0].precision);  // k = 0: undefined precision
    CHECK(report.at[0].recall == 0.0);
    REQUIRE(report.at[1].precision);
    CHECK(*report.at[1].precision == 1.0);
    CHECK(report.at[1].recall == 0.5);
    CHECK(report.at[2].recall == 1.0);  // both planted inside top-3
    CHECK(report.at[3].recall == 1.0);  // all planted in top-k: recall 1
    REQUIRE(report.planted_ranks[0]);
    CHECK(*report.planted_ranks[0] == 1);
    CHECK(*report.planted_ranks[1] == 3);
}

TEST_CASE("generator spec file round-trips keys and planted pairs") {
    std::istringstream in(
        "# synthetic corpus spec\n"
        "vocab_size = 50\n"
        "docs = 1000\n"
        "len_min = 20\n"
        "len_max = 20\n"
        "gap = 2\n"
        "seed = 77\n"
        "genre = synthetic\n"
        "planted = ev0000 -> ev0001 @ 0.8\n"
        "planted = ev0002 -> ev0003 @ 0.5\n");
    auto spec = load_generator_spec(in);
    CHECK(spec.vocab_size == 50);
    CHECK(spec.docs == 1000);
    CHECK(spec.seed == 77);
    REQUIRE(spec.planted.size() == 2);
    CHECK(canonical_form(spec.planted[0].antecedent) == "ev0000");
    CHECK(spec.planted[1].boost == 0.5);

    std::istringstream bad("vocab_size = many\n");
    CHECK_THROWS_AS(load_generator_spec(bad), data_error);
    std::istringstream unknown("wibble = 3\n");
    CHECK_THROWS_AS(load_generator_spec(unknown), data_error);
}

TEST_CASE("planted ground truth file round-trips") {
    std::vector<planted_pair> planted{{vocab_event(0), vocab_event(1), 0.8},
                                      {vocab_event(2), vocab_event(3), 0.25}};
    std::ostringstream out;
    save_planted(planted, out);
    std::istringstream in(out.str());
    auto back = load_planted(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].antecedent == planted[0].antecedent);
    CHECK(back[1].boost == 0.25);
}

TEST_CASE("occurrence accounting: scheduled consequents appear in the corpus") {
    auto spec = base_spec();
    spec.planted.push_back({vocab_event(0), vocab_event(1), 1.0});
    auto corpus = generate_corpus(spec);
    // consequents occur noticeably more often than a background event
    auto b_count = count_occurrences(corpus, vocab_event(1));
    auto background = count_occurrences(corpus, vocab_event(9));
    CHECK(b_count > background);
}
