#pragma once

// Genre-tagged document model over raw narrative text.
//
// Three input routes produce the same model: a directory of plain-text
// files (all description), a screenplay whose dialog blocks are detected
// by layout and kept but tagged, and a pre-segmented record file that
// bypasses all heuristics.  Downstream extraction reads the description
// channel only.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cpmine/util.hpp"

namespace cpmine {

enum class channel : std::uint8_t { description, dialog };

struct segment {
    channel chan = channel::description;
    std::string text;
    std::size_t index = 0;  // ordinal within the document, strictly increasing
};

struct document {
    std::string doc_id;  // unique within a corpus load
    std::string genre;
    std::vector<segment> segments;  // source order
};

struct ingest_error {
    std::string path;
    std::string message;
};

struct corpus_read_result {
    std::vector<document> docs;  // sorted by doc_id
    std::vector<ingest_error> errors;
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Plain-text corpus: every regular file under root is one document, doc_id
// is its root-relative path.  Unreadable files become error records and
// the load continues; invalid UTF-8 is replaced and flagged as a warning.

inline corpus_read_result read_plain_corpus(const std::filesystem::path& root,
                                            std::string_view genre) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw usage_error("corpus root is not a directory: " + root.string());

    corpus_read_result result;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().starts_with(".")) continue;
        files.push_back(entry.path());
    }
    std::vector<std::pair<std::string, fs::path>> ids;
    ids.reserve(files.size());
    for (const auto& p : files)
        ids.emplace_back(fs::relative(p, root).generic_string(), p);
    std::sort(ids.begin(), ids.end());

    for (const auto& [doc_id, path] : ids) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            result.errors.push_back({doc_id, "unreadable file"});
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) {
            result.errors.push_back({doc_id, "read failure"});
            continue;
        }
        std::string text;
        if (!utf8_sanitize(buf.str(), text))
            result.warnings.push_back(doc_id + ": invalid UTF-8 replaced");
        document doc;
        doc.doc_id = doc_id;
        doc.genre = std::string(genre);
        if (!text.empty()) doc.segments.push_back({channel::description, std::move(text), 0});
        result.docs.push_back(std::move(doc));
    }
    if (result.docs.empty() && result.errors.empty())
        result.warnings.push_back("empty corpus directory: " + root.string());
    return result;
}

// ---------------------------------------------------------------------------
// Screenplay layout heuristic.  A character-cue line is short, fully
// uppercase among its cased letters, optionally carries a trailing
// parenthetical ("FRODO (V.O.)"), and starts a dialog block that runs
// until a blank line.  Scene headings (INT./EXT.) and transitions
// (trailing colon) are not cues.  Everything unclassified stays
// description; dialog blocks are kept but tagged so extraction skips them.

namespace detail {

inline bool screenplay_cue_line(std::string_view line) {
    std::string_view s = trim(line);
    if (s.empty() || s.size() > 60) return false;
    if (s.back() == ':') return false;  // transition, e.g. "CUT TO:"
    // scene headings
    for (std::string_view prefix : {"INT.", "EXT.", "INT ", "EXT ", "INT./EXT.", "INT/EXT"})
        if (s.substr(0, prefix.size()) == prefix) return false;
    // strip one trailing parenthetical
    if (s.back() == ')') {
        std::size_t open = s.rfind('(');
        if (open == std::string_view::npos) return false;
        s = trim(s.substr(0, open));
        if (s.empty()) return false;
    }
    if (s.size() > 40) return false;
    bool has_letter = false;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::islower(u)) return false;
        if (std::isalpha(u)) has_letter = true;
    }
    return has_letter;
}

inline bool blank_line(std::string_view line) { return trim(line).empty(); }

}  // namespace detail

inline document read_screenplay(std::string_view raw, std::string_view doc_id,
                                std::string_view genre) {
    document doc;
    doc.doc_id = std::string(doc_id);
    doc.genre = std::string(genre);

    std::string sanitized;
    utf8_sanitize(raw, sanitized);

    std::vector<std::string_view> lines = split(sanitized, '\n');
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);

    std::size_t index = 0;
    std::string pending;  // accumulating description text
    auto flush_description = [&] {
        std::string_view t = trim(pending);
        if (!t.empty()) doc.segments.push_back({channel::description, std::string(t), index++});
        pending.clear();
    };

    std::size_t i = 0;
    while (i < lines.size()) {
        if (detail::screenplay_cue_line(lines[i])) {
            flush_description();
            std::string block(trim(lines[i]));
            ++i;
            while (i < lines.size() && !detail::blank_line(lines[i])) {
                block += '\n';
                block += trim(lines[i]);
                ++i;
            }
            doc.segments.push_back({channel::dialog, std::move(block), index++});
        } else {
            if (!pending.empty()) pending += '\n';
            pending += lines[i];
            ++i;
        }
    }
    flush_description();
    return doc;
}

// ---------------------------------------------------------------------------
// Pre-segmented document file: one segment per line,
//   doc_id TAB genre TAB segment_index TAB channel TAB text
// where channel is the literal "description" or "dialog" and text is
// TSV-escaped.  Round-trips the document model exactly.

inline void save_segmented(const std::vector<document>& docs, std::ostream& os) {
    std::vector<const document*> sorted;
    sorted.reserve(docs.size());
    for (const auto& d : docs) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(),
              [](const document* a, const document* b) { return a->doc_id < b->doc_id; });
    for (const document* d : sorted) {
        for (const auto& seg : d->segments) {
            os << d->doc_id << '\t' << d->genre << '\t' << seg.index << '\t'
               << (seg.chan == channel::dialog ? "dialog" : "description") << '\t'
               << tsv_escape(seg.text) << '\n';
        }
    }
}

inline std::vector<document> load_segmented(std::istream& is) {
    struct rec {
        std::size_t index;
        segment seg;
    };
    std::map<std::string, std::pair<std::string, std::vector<rec>>> by_doc;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, '\t');
        if (f.size() != 5) throw data_error("expected 5 tab-separated fields", lineno);
        if (f[0].empty()) throw data_error("empty doc_id", lineno);
        std::uint64_t index = 0;
        if (!parse_u64(f[2], index))
            throw data_error("bad segment index \"" + std::string(f[2]) + "\"", lineno);
        segment seg;
        if (f[3] == "description")
            seg.chan = channel::description;
        else if (f[3] == "dialog")
            seg.chan = channel::dialog;
        else
            throw data_error("unknown channel \"" + std::string(f[3]) + "\"", lineno);
        seg.index = index;
        seg.text = tsv_unescape(f[4], lineno);

        auto& slot = by_doc[std::string(f[0])];
        if (slot.second.empty())
            slot.first = std::string(f[1]);
        else if (slot.first != f[1])
            throw data_error("conflicting genre for doc \"" + std::string(f[0]) + "\"", lineno);
        for (const auto& r : slot.second)
            if (r.index == index)
                throw data_error("duplicate segment index " + std::to_string(index) + " in doc \"" +
                                     std::string(f[0]) + "\"",
                                 lineno);
        slot.second.push_back({static_cast<std::size_t>(index), std::move(seg)});
    }

    std::vector<document> out;
    out.reserve(by_doc.size());
    for (auto& [doc_id, slot] : by_doc) {
        std::sort(slot.second.begin(), slot.second.end(),
                  [](const rec& a, const rec& b) { return a.index < b.index; });
        document doc;
        doc.doc_id = doc_id;
        doc.genre = slot.first;
        for (auto& r : slot.second) doc.segments.push_back(std::move(r.seg));
        out.push_back(std::move(doc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus statistics: document and whitespace-token counts over the
// description channel, total and per genre.

struct genre_stats {
    std::uint64_t documents = 0;
    std::uint64_t words = 0;
};

struct corpus_stats_report {
    std::uint64_t documents = 0;
    std::uint64_t words = 0;
    std::map<std::string, genre_stats> per_genre;
};

inline std::uint64_t whitespace_token_count(std::string_view text) {
    std::uint64_t n = 0;
    bool in_token = false;
    for (char c : text) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

inline corpus_stats_report corpus_report(const std::vector<document>& docs) {
    corpus_stats_report report;
    for (const auto& doc : docs) {
        std::uint64_t words = 0;
        for (const auto& seg : doc.segments)
            if (seg.chan == channel::description) words += whitespace_token_count(seg.text);
        auto& g = report.per_genre[doc.genre];
        g.documents += 1;
        g.words += words;
        report.documents += 1;
        report.words += words;
    }
    return report;
}

inline void write_stats_report(const corpus_stats_report& r, std::ostream& os) {
    os << "corpus statistics (description channel)\n";
    os << "genre\tdocuments\twords\n";
    for (const auto& [genre, g] : r.per_genre)
        os << genre << '\t' << g.documents << '\t' << g.words << '\n';
    os << "total\t" << r.documents << '\t' << r.words << '\n';
}

}  // namespace cpmine
