// End-to-end checks of the cpmine binary: spawns the real executable
// (path in CPMINE_BIN) against small corpora and verifies exit codes,
// output files and reproducibility.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cpmine/counts.hpp"
#include "cpmine/ranking.hpp"
#include "cpmine/scoring.hpp"
#include "cpmine/synthetic.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* bin = std::getenv("CPMINE_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

int run(const std::string& args) {
    std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) { return testsupport::read_file(p); }

const std::string kSynthSpec =
    "vocab_size = 12\n"
    "docs = 60\n"
    "len_min = 10\n"
    "len_max = 10\n"
    "gap = 2\n"
    "seed = 7\n"
    "planted = ev0000 -> ev0001 @ 0.9\n";

}  // namespace

TEST_CASE("synth with the same seed writes identical outputs") {
    testsupport::temp_dir dir("synth");
    write_file(dir.path() / "spec.txt", kSynthSpec);

    auto out1 = dir.path() / "run1";
    auto out2 = dir.path() / "run2";
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --seed 7 --out " +
                out1.string()) == 0);
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --seed 7 --out " +
                out2.string()) == 0);
    CHECK(slurp(out1 / "events.tsv") == slurp(out2 / "events.tsv"));
    CHECK(slurp(out1 / "planted.tsv") == slurp(out2 / "planted.tsv"));
    CHECK_FALSE(slurp(out1 / "events.tsv").empty());

    auto out3 = dir.path() / "run3";
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --seed 8 --out " +
                out3.string()) == 0);
    CHECK(slurp(out1 / "events.tsv") != slurp(out3 / "events.tsv"));
}

TEST_CASE("count, score and rank stage through files") {
    testsupport::temp_dir dir("pipeline");
    write_file(dir.path() / "spec.txt", kSynthSpec);
    auto synth_out = dir.path() / "synth";
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --out " +
                synth_out.string()) == 0);

    auto count_out = dir.path() / "count";
    REQUIRE(run("count --input " + (synth_out / "events.tsv").string() +
                " --max-distance 3 --jobs 2 --out " + count_out.string()) == 0);
    REQUIRE(fs::exists(count_out / "counts.tsv"));
    REQUIRE(fs::exists(count_out / "count.config"));

    auto score_out = dir.path() / "score";
    REQUIRE(run("score --input " + (count_out / "counts.tsv").string() +
                " --scorer cp --window 3 --alpha 1 --min-count 2 --out " + score_out.string()) ==
            0);

    auto rank_out = dir.path() / "rank";
    REQUIRE(run("rank --input " + (score_out / "pairs.tsv").string() + " --top-k 5 --out " +
                rank_out.string()) == 0);

    std::ifstream in(rank_out / "topk.tsv");
    auto top = cpmine::load_pairs(in);
    REQUIRE(top.size() == 5);
    CHECK(cpmine::canonical_form(top[0].e1) == "ev0000");
    CHECK(cpmine::canonical_form(top[0].e2) == "ev0001");

    // staged CLI run equals the same pipeline composed in-process
    std::ifstream ein(synth_out / "events.tsv");
    auto sequences = cpmine::load_event_stream(ein);
    auto table = cpmine::count_pairs(sequences, 3);
    cpmine::score_config cfg;
    cfg.window = 3;
    cfg.w_max = 3;
    cfg.alpha = 1.0;
    cfg.min_pair_count = 2;
    auto ranked = cpmine::rank_pairs(table, cfg, cpmine::scorer_kind::cp);
    std::ostringstream expected;
    cpmine::save_pairs(cpmine::take_top(ranked, 5), expected);
    CHECK(slurp(rank_out / "topk.tsv") == expected.str());
}

TEST_CASE("score reruns are byte-identical and config is written") {
    testsupport::temp_dir dir("rerun");
    write_file(dir.path() / "spec.txt", kSynthSpec);
    auto synth_out = dir.path() / "synth";
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --out " +
                synth_out.string()) == 0);
    auto count_out = dir.path() / "count";
    REQUIRE(run("count --input " + (synth_out / "events.tsv").string() +
                " --max-distance 2 --out " + count_out.string()) == 0);

    auto s1 = dir.path() / "s1";
    auto s2 = dir.path() / "s2";
    std::string flags = " --scorer cp_variant --w-max 2 --alpha 1 --min-count 1 ";
    REQUIRE(run("score --input " + (count_out / "counts.tsv").string() + flags + "--out " +
                s1.string()) == 0);
    REQUIRE(run("score --input " + (count_out / "counts.tsv").string() + flags + "--out " +
                s2.string()) == 0);
    CHECK(slurp(s1 / "pairs.tsv") == slurp(s2 / "pairs.tsv"));
    CHECK_FALSE(slurp(s1 / "score.config").empty());

    // the scores in the file are descending
    std::ifstream in(s1 / "pairs.tsv");
    auto rows = cpmine::load_pairs(in);
    REQUIRE_FALSE(rows.empty());
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].score >= rows[i].score);
}

TEST_CASE("ingest and report produce corpus statistics") {
    testsupport::temp_dir dir("ingest");
    write_file(dir.path() / "corpus/a.txt", "We packed the tent before dawn.");
    write_file(dir.path() / "corpus/b.txt", "He grabbed the rope.");

    auto ingest_out = dir.path() / "docs";
    REQUIRE(run("ingest --input " + (dir.path() / "corpus").string() +
                " --format plain --genre camping --out " + ingest_out.string()) == 0);
    REQUIRE(fs::exists(ingest_out / "documents.tsv"));

    auto report_out = dir.path() / "report";
    REQUIRE(run("report --documents " + (ingest_out / "documents.tsv").string() + " --out " +
                report_out.string()) == 0);
    auto stats = slurp(report_out / "corpus_stats.txt");
    CHECK(stats.find("camping\t2\t10") != std::string::npos);
    CHECK(stats.find("total\t2\t10") != std::string::npos);

    auto extract_out = dir.path() / "events";
    REQUIRE(run("extract --input " + (ingest_out / "documents.tsv").string() + " --out " +
                extract_out.string()) == 0);
    std::ifstream in(extract_out / "events.tsv");
    auto seqs = cpmine::load_event_stream(in);
    REQUIRE(seqs.size() == 2);
    CHECK(cpmine::canonical_form(seqs[0].events.at(0)) == "person - pack - something");
    CHECK(cpmine::canonical_form(seqs[1].events.at(0)) == "person - grab - something");
}

TEST_CASE("missing inputs exit with the usage code, bad data with the data code") {
    testsupport::temp_dir dir("errors");
    CHECK(run("count --input " + (dir.path() / "nope.tsv").string() + " --out " +
              (dir.path() / "o").string()) == 2);
    CHECK(run("bogus-subcommand") == 2);
    CHECK(run("count") == 2);  // missing required flags

    write_file(dir.path() / "broken.tsv", "this is not an event stream\n");
    CHECK(run("count --input " + (dir.path() / "broken.tsv").string() + " --out " +
              (dir.path() / "o").string()) == 3);

    write_file(dir.path() / "broken_counts.tsv", "count_table v1\nmax_distance\t0\n");
    CHECK(run("score --input " + (dir.path() / "broken_counts.tsv").string() + " --out " +
              (dir.path() / "o2").string()) == 3);
}

TEST_CASE("judge-export derives high and low lists from a ranked file") {
    testsupport::temp_dir dir("judge");
    write_file(dir.path() / "spec.txt", kSynthSpec);
    auto synth_out = dir.path() / "synth";
    REQUIRE(run("synth --spec " + (dir.path() / "spec.txt").string() + " --out " +
                synth_out.string()) == 0);
    auto count_out = dir.path() / "count";
    REQUIRE(run("count --input " + (synth_out / "events.tsv").string() +
                " --max-distance 2 --out " + count_out.string()) == 0);
    auto score_out = dir.path() / "score";
    REQUIRE(run("score --input " + (count_out / "counts.tsv").string() +
                " --scorer cp --window 2 --min-count 1 --out " + score_out.string()) == 0);

    auto judge_out = dir.path() / "judge";
    REQUIRE(run("judge-export --input " + (score_out / "pairs.tsv").string() +
                " --top-k 10 --seed 5 --out " + judge_out.string()) == 0);
    auto items = slurp(judge_out / "judgment_items.csv");
    auto key = slurp(judge_out / "judgment_key.csv");
    CHECK(items.find("item_id,pair_left,pair_right") == 0);
    CHECK(key.find("item_id,high_side") == 0);
    // ten items plus header
    CHECK(std::count(items.begin(), items.end(), '\n') == 11);

    auto judge2 = dir.path() / "judge2";
    REQUIRE(run("judge-export --input " + (score_out / "pairs.tsv").string() +
                " --top-k 10 --seed 5 --out " + judge2.string()) == 0);
    CHECK(slurp(judge2 / "judgment_items.csv") == items);
}

TEST_CASE("compare runs against a verb-pair lexicon") {
    testsupport::temp_dir dir("compare");
    // a tiny mined pairs file
    std::vector<cpmine::scored_pair> mined;
    cpmine::scored_pair p;
    p.e1 = testsupport::ev("pack");
    p.e2 = testsupport::ev("leave");
    p.score = 3.5;
    p.genre = "camping";
    mined.push_back(p);
    std::ostringstream pairs_text;
    cpmine::save_pairs(mined, pairs_text);
    write_file(dir.path() / "mined.tsv", pairs_text.str());

    auto fixture = testsupport::fixture_dir() / "verbocean_small.txt";
    auto out = dir.path() / "cmp";
    REQUIRE(run("compare --mined " + (dir.path() / "mined.tsv").string() + " --kb " +
                fixture.string() + " --kb-format pairs --relation happens-before --out " +
                out.string()) == 0);
    auto text = slurp(out / "overlap.txt");
    CHECK(text.find("pairs in both: 1") != std::string::npos);
}
