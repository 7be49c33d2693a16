// cpmine: batch pipeline for mining causal event pairs from narrative
// corpora.  Subcommands stage their work through documented on-disk
// formats (documents.tsv, events.tsv, counts.tsv, pairs files) so any
// stage can be re-run or swapped out.  Every run drops a <command>.config
// next to its outputs; re-running with the same options reproduces the
// outputs byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpmine/corpus.hpp"
#include "cpmine/counts.hpp"
#include "cpmine/event.hpp"
#include "cpmine/extraction.hpp"
#include "cpmine/kb.hpp"
#include "cpmine/ranking.hpp"
#include "cpmine/scoring.hpp"
#include "cpmine/synthetic.hpp"
#include "cpmine/util.hpp"

namespace fs = std::filesystem;
using namespace cpmine;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::ifstream open_input(const fs::path& path) {
    if (!fs::exists(path)) throw usage_error("missing input: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open input: " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot open output: " + path.string());
    return out;
}

void write_config(const CLI::App* sub, const fs::path& out_dir) {
    auto out = open_output(out_dir / (sub->get_name() + ".config"));
    out << sub->config_to_str(true, false);
}

scorer_kind parse_scorer(const std::string& name) {
    auto kind = scorer_from_string(name);
    if (!kind) throw usage_error("unknown scorer: " + name);
    return *kind;
}

struct lexicon_flags {
    std::string persons, stop_verbs, particles, verb_stems;

    extraction_lexicons build() const {
        extraction_lexicons lex = extraction_lexicons::builtin();
        auto merge_file = [](const std::string& path, std::unordered_set<std::string>& into) {
            if (path.empty()) return;
            auto in = open_input(path);
            load_lexicon_file(in, into);
        };
        merge_file(persons, lex.person_words);
        merge_file(stop_verbs, lex.stop_verbs);
        merge_file(particles, lex.particles);
        merge_file(verb_stems, lex.verb_stems);
        return lex;
    }
};

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& format, const std::string& genre,
               const fs::path& out_dir) {
    std::vector<document> docs;
    std::vector<ingest_error> errors;
    std::vector<std::string> warnings;

    if (format == "plain") {
        auto result = read_plain_corpus(input, genre);
        docs = std::move(result.docs);
        errors = std::move(result.errors);
        warnings = std::move(result.warnings);
    } else if (format == "screenplay") {
        fs::path p(input);
        std::vector<std::pair<std::string, fs::path>> files;
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file() &&
                    !entry.path().filename().string().starts_with("."))
                    files.emplace_back(fs::relative(entry.path(), p).generic_string(),
                                       entry.path());
            std::sort(files.begin(), files.end());
        } else if (fs::is_regular_file(p)) {
            files.emplace_back(p.filename().generic_string(), p);
        } else {
            throw usage_error("missing input: " + input);
        }
        for (const auto& [doc_id, path] : files) {
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                errors.push_back({doc_id, "unreadable file"});
                continue;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            docs.push_back(read_screenplay(buf.str(), doc_id, genre));
        }
    } else if (format == "segmented") {
        auto in = open_input(input);
        docs = load_segmented(in);
    } else {
        throw usage_error("unknown format: " + format);
    }

    auto out = open_output(out_dir / "documents.tsv");
    save_segmented(docs, out);
    for (const auto& e : errors) std::cerr << "error: " << e.path << ": " << e.message << '\n';
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << docs.size() << " documents to " << (out_dir / "documents.tsv").string()
              << '\n';
    return errors.empty() ? 0 : kExitData;
}

int cmd_extract(const std::string& input, const lexicon_flags& lex_flags, bool retain_objects,
                const fs::path& out_dir) {
    auto in = open_input(input);
    auto docs = load_segmented(in);
    auto lex = lex_flags.build();
    extraction_options opt;
    opt.retain_object_lemmas = retain_objects;

    std::vector<event_sequence> sequences;
    sequences.reserve(docs.size());
    std::size_t total = 0;
    for (const auto& doc : docs) {
        auto seq = extract_events(doc, lex, opt);
        total += seq.events.size();
        sequences.push_back(std::move(seq));
    }
    auto out = open_output(out_dir / "events.tsv");
    save_event_stream(sequences, out);
    std::cout << "extracted " << total << " events from " << docs.size() << " documents\n";
    return 0;
}

int cmd_count(const std::string& input, int max_distance, int jobs, const fs::path& out_dir) {
    auto in = open_input(input);
    auto sequences = load_event_stream(in);
    auto table = count_pairs_sharded(sequences, max_distance, jobs);
    auto out = open_output(out_dir / "counts.tsv");
    table.save(out);
    std::cout << "counted " << table.total_events() << " events, vocabulary "
              << table.vocabulary_size() << ", max distance " << max_distance << '\n';
    return 0;
}

int cmd_score(const std::string& input, const std::string& scorer_name, const score_config& cfg,
              const std::string& genre_override, const fs::path& out_dir) {
    auto in = open_input(input);
    auto table = count_table::load(in);
    auto kind = parse_scorer(scorer_name);
    std::optional<std::string> genre;
    if (!genre_override.empty()) genre = genre_override;
    auto ranked = rank_pairs(table, cfg, kind, genre);
    auto out = open_output(out_dir / "pairs.tsv");
    save_pairs(ranked, out);
    std::cout << "scored " << ranked.size() << " pairs with " << scorer_name << '\n';
    return 0;
}

std::vector<scored_pair> sort_ranked(std::vector<scored_pair> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const scored_pair& a, const scored_pair& b) {
        return rank_order(a, b, canonical_form(a.e1), canonical_form(a.e2), canonical_form(b.e1),
                          canonical_form(b.e2));
    });
    return rows;
}

int cmd_rank(const std::string& input, std::size_t top_k, const fs::path& out_dir) {
    auto in = open_input(input);
    auto rows = sort_ranked(load_pairs(in));
    auto top = take_top(rows, top_k);
    auto out = open_output(out_dir / "topk.tsv");
    save_pairs(top, out);
    std::cout << "kept top " << top.size() << " of " << rows.size() << " pairs\n";
    return 0;
}

int cmd_sample(const std::vector<std::string>& inputs,
               const std::vector<std::string>& weight_args, std::size_t total,
               const fs::path& out_dir) {
    std::map<std::string, std::vector<scored_pair>> per_genre;
    for (const auto& path : inputs) {
        auto in = open_input(path);
        for (auto& row : load_pairs(in)) per_genre[row.genre].push_back(std::move(row));
    }
    for (auto& [genre, rows] : per_genre) rows = sort_ranked(std::move(rows));

    std::map<std::string, std::uint64_t> weights;
    for (const auto& arg : weight_args) {
        auto eq = arg.find('=');
        std::uint64_t w = 0;
        if (eq == std::string::npos || !parse_u64(std::string_view(arg).substr(eq + 1), w))
            throw usage_error("expected --weight genre=N, got: " + arg);
        weights[arg.substr(0, eq)] = w;
    }
    if (weights.empty())  // default: weight by list size
        for (const auto& [genre, rows] : per_genre) weights[genre] = rows.size();

    auto result = proportional_sample(per_genre, weights, total);
    auto out = open_output(out_dir / "sampled.tsv");
    save_pairs(result.selected, out);
    auto report = open_output(out_dir / "sample_report.txt");
    report << "genre\tquota\tavailable\n";
    for (const auto& [genre, quota] : result.quotas) {
        auto it = per_genre.find(genre);
        report << genre << '\t' << quota << '\t' << (it == per_genre.end() ? 0 : it->second.size())
               << '\n';
        std::cout << genre << ": " << quota << '\n';
    }
    std::cout << "sampled " << result.selected.size() << " pairs\n";
    return 0;
}

int cmd_dedup(const std::string& input, const fs::path& out_dir) {
    auto in = open_input(input);
    auto rows = load_pairs(in);
    auto unique = dedup(rows);
    auto out = open_output(out_dir / "deduped.tsv");
    save_pairs(unique, out);
    std::cout << "removed " << rows.size() - unique.size() << " duplicates, kept " << unique.size()
              << '\n';
    return 0;
}

int cmd_judge_export(const std::string& high_path, const std::string& low_path,
                     const std::string& full_path, std::size_t top_k, std::uint64_t seed,
                     const fs::path& out_dir) {
    std::vector<scored_pair> high, low;
    if (!full_path.empty()) {
        auto in = open_input(full_path);
        auto rows = sort_ranked(load_pairs(in));
        if (rows.empty()) throw usage_error("no pairs in " + full_path);
        if (top_k == 0) throw usage_error("--top-k is required with --input");
        high = take_top(rows, top_k);
        std::size_t quartile = std::max<std::size_t>(1, rows.size() / 4);
        std::size_t low_start = std::max(rows.size() - quartile, high.size());
        low.assign(rows.begin() + static_cast<std::ptrdiff_t>(low_start), rows.end());
        if (low.empty()) throw usage_error("not enough pairs below the high cut for a low pool");
    } else {
        if (high_path.empty() || low_path.empty())
            throw usage_error("need either --input or both --high and --low");
        auto hin = open_input(high_path);
        high = load_pairs(hin);
        auto lin = open_input(low_path);
        low = load_pairs(lin);
    }

    auto items = make_judgment_items(high, low, seed);
    auto visible = open_output(out_dir / "judgment_items.csv");
    auto key = open_output(out_dir / "judgment_key.csv");
    write_judgment_files(items, visible, key);
    std::cout << "exported " << items.size() << " judgment items\n";
    return 0;
}

int cmd_compare(const std::string& mined_path, const std::string& kb_path,
                const std::string& kb_format, const std::string& relation,
                const std::string& mode_name, bool keep_particles, std::uint64_t min_freq,
                int kb_window, const fs::path& out_dir) {
    auto min_in = open_input(mined_path);
    auto mined = load_pairs(min_in);

    if (kb_format == "verbs") {
        auto in = open_input(kb_path);
        auto reference = load_verb_pairs(in);
        auto [count, hits] = pairlist_overlap(mined, reference, keep_particles);
        auto out = open_output(out_dir / "overlap.txt");
        out << "reference list overlap: " << count << " of " << reference.size()
            << " reference pairs found in " << mined.size() << " mined pairs\n\n";
        for (const auto& [v1, v2] : hits) out << "M\t" << v1 << '\t' << v2 << '\n';
        std::cout << count << " of " << reference.size() << " reference pairs found\n";
        return 0;
    }

    external_kb kb;
    if (kb_format == "pairs") {
        auto in = open_input(kb_path);
        std::optional<std::string> filter;
        if (!relation.empty()) filter = relation;
        kb = load_verbocean(in, filter, fs::path(kb_path).filename().string());
    } else if (kb_format == "relgram") {
        auto in = open_input(kb_path);
        kb = load_relgram_tuples(in, min_freq, kb_window,
                                 fs::path(kb_path).filename().string());
    } else {
        throw usage_error("unknown kb format: " + kb_format);
    }

    overlap_options opt;
    opt.keep_particles = keep_particles;
    if (mode_name == "verb_only")
        opt.mode = match_mode::verb_only;
    else if (mode_name == "full_tuple")
        opt.mode = match_mode::full_tuple;
    else
        throw usage_error("unknown match mode: " + mode_name);

    auto report = overlap(mined, kb, opt);
    auto out = open_output(out_dir / "overlap.txt");
    write_overlap_report(report, kb, mined.size(), out);
    std::cout << "pairs in both: " << report.distinct_matched << '\n';
    return 0;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed_override,
              const fs::path& out_dir) {
    auto in = open_input(spec_path);
    auto spec = load_generator_spec(in);
    if (seed_override) spec.seed = *seed_override;
    auto corpus = generate_corpus(spec);

    auto events = open_output(out_dir / "events.tsv");
    save_event_stream(corpus, events);
    auto planted = open_output(out_dir / "planted.tsv");
    save_planted(spec.planted, planted);
    std::size_t total = 0;
    for (const auto& seq : corpus) total += seq.events.size();
    std::cout << "generated " << corpus.size() << " documents, " << total << " events\n";
    return 0;
}

int cmd_report(const std::string& documents_path, const std::string& planted_path,
               const std::string& ranked_path, const std::vector<std::size_t>& ks,
               const fs::path& out_dir) {
    if (!documents_path.empty()) {
        auto in = open_input(documents_path);
        auto docs = load_segmented(in);
        auto report = corpus_report(docs);
        auto out = open_output(out_dir / "corpus_stats.txt");
        write_stats_report(report, out);
        std::ostringstream echo;
        write_stats_report(report, echo);
        std::cout << echo.str();
        return 0;
    }
    if (planted_path.empty() || ranked_path.empty())
        throw usage_error("need --documents, or --planted with --ranked");
    auto pin = open_input(planted_path);
    auto planted = load_planted(pin);
    auto rin = open_input(ranked_path);
    auto ranked = load_pairs(rin);
    auto report = evaluate_recovery(planted, ranked, ks);
    auto out = open_output(out_dir / "recovery.txt");
    write_recovery_report(report, planted, out);
    std::ostringstream echo;
    write_recovery_report(report, planted, echo);
    std::cout << echo.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mine causal event pairs from narrative corpora"};
    app.require_subcommand(1);

    std::string input, format = "plain", genre, out_dir = ".";
    std::string scorer_name = "cp";
    score_config cfg;
    std::string window_semantics = "cumulative";
    int max_distance = 3, jobs = 1, kb_window = 50;
    std::size_t top_k = 0, total = 0;
    std::uint64_t seed = 0, min_freq = 0;
    bool retain_objects = false, keep_particles = false;
    lexicon_flags lex_flags;
    std::vector<std::string> inputs, weight_args;
    std::string high_path, low_path, full_path;
    std::string kb_path, kb_format = "pairs", relation, mode_name = "verb_only";
    std::string documents_path, planted_path, ranked_path;
    std::vector<std::size_t> ks{10};
    std::optional<std::uint64_t> seed_override;

    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->set_config("--config", "", "read options from a config file");
    };

    auto* ingest = app.add_subcommand("ingest", "read raw documents into documents.tsv");
    ingest->add_option("--input", input, "corpus directory or file")->required();
    ingest->add_option("--format", format, "plain|screenplay|segmented")
        ->check(CLI::IsMember({"plain", "screenplay", "segmented"}));
    ingest->add_option("--genre", genre, "genre tag for the ingested documents");
    add_out(ingest);

    auto* extract = app.add_subcommand("extract", "extract events from documents.tsv");
    extract->add_option("--input", input, "documents.tsv from ingest")->required();
    extract->add_option("--persons", lex_flags.persons, "extra person-word lexicon file");
    extract->add_option("--stop-verbs", lex_flags.stop_verbs, "extra stop-verb lexicon file");
    extract->add_option("--particles", lex_flags.particles, "extra particle lexicon file");
    extract->add_option("--verb-stems", lex_flags.verb_stems, "extra verb-stem lexicon file");
    extract->add_flag("--retain-objects", retain_objects,
                      "keep noun lemmas instead of generalizing to 'something'");
    add_out(extract);

    auto* count = app.add_subcommand("count", "build the pair count table from events.tsv");
    count->add_option("--input", input, "events.tsv")->required();
    count->add_option("--max-distance", max_distance, "largest pair distance to count")
        ->check(CLI::PositiveNumber);
    count->add_option("--jobs", jobs, "parallel counting shards")->check(CLI::PositiveNumber);
    add_out(count);

    auto* score = app.add_subcommand("score", "score and rank all pairs from counts.tsv");
    score->add_option("--input", input, "counts.tsv")->required();
    score->add_option("--scorer", scorer_name, "pmi|scp|cp|cp_variant")
        ->check(CLI::IsMember({"pmi", "scp", "cp", "cp_variant"}));
    score->add_option("--window", cfg.window, "window for pmi/scp/cp");
    score->add_option("--w-max", cfg.w_max, "outer window bound for cp_variant");
    score->add_option("--alpha", cfg.alpha, "ordering-ratio smoothing");
    score->add_option("--min-count", cfg.min_pair_count, "minimum unordered joint count");
    score->add_option("--window-semantics", window_semantics,
                      "cp_variant term windows: cumulative|exact")
        ->check(CLI::IsMember({"cumulative", "exact"}));
    score->add_option("--genre", genre, "override the genre tag on output rows");
    add_out(score);

    auto* rank = app.add_subcommand("rank", "keep the top-k pairs of a pairs file");
    rank->add_option("--input", input, "pairs.tsv")->required();
    rank->add_option("--top-k", top_k, "how many pairs to keep")->required();
    add_out(rank);

    auto* sample = app.add_subcommand("sample", "proportional per-genre sampling");
    sample->add_option("--input", inputs, "pairs files (repeatable)")->required();
    sample->add_option("--weight", weight_args, "genre=N weight (repeatable)");
    sample->add_option("--total", total, "total pairs to select")->required();
    add_out(sample);

    auto* dedup_cmd = app.add_subcommand("dedup", "drop duplicate pairs, best score wins");
    dedup_cmd->add_option("--input", input, "pairs.tsv")->required();
    add_out(dedup_cmd);

    auto* judge = app.add_subcommand("judge-export",
                                     "pair high and low pairs into judgment files");
    judge->add_option("--high", high_path, "pairs file with the high list");
    judge->add_option("--low", low_path, "pairs file with the low pool");
    judge->add_option("--input", full_path, "full ranked pairs file (derives high and low)");
    judge->add_option("--top-k", top_k, "high-list size when deriving from --input");
    judge->add_option("--seed", seed, "random seed");
    add_out(judge);

    auto* compare = app.add_subcommand("compare", "overlap against an external knowledge base");
    compare->add_option("--mined", input, "mined pairs file")->required();
    compare->add_option("--kb", kb_path, "knowledge base file")->required();
    compare->add_option("--kb-format", kb_format, "pairs|relgram|verbs")
        ->check(CLI::IsMember({"pairs", "relgram", "verbs"}));
    compare->add_option("--relation", relation, "relation filter for the pairs format");
    compare->add_option("--mode", mode_name, "verb_only|full_tuple")
        ->check(CLI::IsMember({"verb_only", "full_tuple"}));
    compare->add_flag("--keep-particles", keep_particles,
                      "project verb-particle phrases instead of bare verbs");
    compare->add_option("--min-freq", min_freq, "minimum windowed frequency (relgram)");
    compare->add_option("--kb-window", kb_window, "frequency window: 1|5|50 (relgram)")
        ->check(CLI::IsMember({"1", "5", "50"}));
    add_out(compare);

    auto* synth = app.add_subcommand("synth", "generate a corpus with planted causal pairs");
    synth->add_option("--spec", input, "generator spec file")->required();
    synth->add_option("--seed", seed_override, "override the spec seed");
    add_out(synth);

    auto* report = app.add_subcommand("report", "corpus statistics or planted-pair recovery");
    report->add_option("--documents", documents_path, "documents.tsv for corpus statistics");
    report->add_option("--planted", planted_path, "planted.tsv from synth");
    report->add_option("--ranked", ranked_path, "ranked pairs file");
    report->add_option("--ks", ks, "k values for precision/recall");
    add_out(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        cfg.variant_windows =
            window_semantics == "exact" ? window_mode::exact : window_mode::cumulative;
        fs::path out(out_dir);
        int rc = 1;
        if (app.got_subcommand(ingest)) {
            write_config(ingest, out);
            rc = cmd_ingest(input, format, genre, out);
        } else if (app.got_subcommand(extract)) {
            write_config(extract, out);
            rc = cmd_extract(input, lex_flags, retain_objects, out);
        } else if (app.got_subcommand(count)) {
            write_config(count, out);
            rc = cmd_count(input, max_distance, jobs, out);
        } else if (app.got_subcommand(score)) {
            write_config(score, out);
            rc = cmd_score(input, scorer_name, cfg, genre, out);
        } else if (app.got_subcommand(rank)) {
            write_config(rank, out);
            rc = cmd_rank(input, top_k, out);
        } else if (app.got_subcommand(sample)) {
            write_config(sample, out);
            rc = cmd_sample(inputs, weight_args, total, out);
        } else if (app.got_subcommand(dedup_cmd)) {
            write_config(dedup_cmd, out);
            rc = cmd_dedup(input, out);
        } else if (app.got_subcommand(judge)) {
            write_config(judge, out);
            rc = cmd_judge_export(high_path, low_path, full_path, top_k, seed, out);
        } else if (app.got_subcommand(compare)) {
            write_config(compare, out);
            rc = cmd_compare(input, kb_path, kb_format, relation, mode_name, keep_particles,
                             min_freq, kb_window, out);
        } else if (app.got_subcommand(synth)) {
            write_config(synth, out);
            rc = cmd_synth(input, seed_override, out);
        } else if (app.got_subcommand(report)) {
            write_config(report, out);
            rc = cmd_report(documents_path, planted_path, ranked_path, ks, out);
        }
        return rc;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
