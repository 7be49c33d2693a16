#pragma once

// Generalized event tuples and their canonical text form.
//
// An event is (subject class, verb, optional particle, object), rendered
// as "[subject - ]verb[ particle][ - object]", e.g.
//   person - pack up - backpack
//   send - something
//   gag
// Objects are either a generalization class (person/something) or a
// retained noun lemma.  canonical_form and parse_canonical are mutual
// inverses over the event domain.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cpmine/util.hpp"

namespace cpmine {

enum class arg_class : std::uint8_t { none, person, something };

// Object slot: a class, or a literal noun lemma when generalization is
// switched off.  Lemmas equal to a class name collapse into that class so
// the canonical form stays injective.
struct object_ref {
    arg_class cls = arg_class::none;
    std::string lemma;  // non-empty only when a literal is retained

    static object_ref none() { return {}; }
    static object_ref person() { return {arg_class::person, {}}; }
    static object_ref something() { return {arg_class::something, {}}; }
    static object_ref literal(std::string_view word) {
        if (word == "person") return person();
        if (word == "something") return something();
        return {arg_class::none, std::string(word)};
    }

    bool is_literal() const { return !lemma.empty(); }
    bool empty() const { return !is_literal() && cls == arg_class::none; }

    friend bool operator==(const object_ref&, const object_ref&) = default;
    friend auto operator<=>(const object_ref&, const object_ref&) = default;
};

struct event {
    arg_class subject = arg_class::none;
    std::string verb;      // lowercase lemma, non-empty
    std::string particle;  // empty when absent
    object_ref object;

    friend bool operator==(const event&, const event&) = default;
    friend auto operator<=>(const event&, const event&) = default;
};

// Ordered events of one document; order equals textual mention order.
struct event_sequence {
    std::string doc_id;
    std::string genre;
    std::vector<event> events;
};

namespace detail {

inline bool valid_lemma_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isspace(u) || std::isupper(u) || c == '\t') return false;
    }
    return true;
}

inline const char* class_name(arg_class c) {
    switch (c) {
        case arg_class::person: return "person";
        case arg_class::something: return "something";
        default: return "";
    }
}

}  // namespace detail

inline std::string canonical_form(const event& e) {
    std::string out;
    if (e.subject != arg_class::none) {
        out += detail::class_name(e.subject);
        out += " - ";
    }
    out += e.verb;
    if (!e.particle.empty()) {
        out += ' ';
        out += e.particle;
    }
    if (!e.object.empty()) {
        out += " - ";
        out += e.object.is_literal() ? e.object.lemma : detail::class_name(e.object.cls);
    }
    return out;
}

// Inverse of canonical_form.  Throws data_error naming the offending token.
inline event parse_canonical(std::string_view text, std::size_t line = 0) {
    std::string_view s = trim(text);
    if (s.empty()) throw data_error("empty event text", line);

    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(" - ", start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 3;
    }
    if (parts.size() > 3)
        throw data_error("too many ' - ' separators in event \"" + std::string(s) + "\"", line);

    std::size_t i = 0;
    event e;
    if (parts.size() > 1 && (parts[0] == "person" || parts[0] == "something")) {
        e.subject = parts[0] == "person" ? arg_class::person : arg_class::something;
        ++i;
    } else if (parts.size() == 3) {
        throw data_error("bad subject class \"" + std::string(parts[0]) + "\"", line);
    }

    if (i >= parts.size())
        throw data_error("missing verb in event \"" + std::string(s) + "\"", line);
    auto verb_tokens = split(parts[i], ' ');
    if (verb_tokens.size() > 2)
        throw data_error("bad verb phrase \"" + std::string(parts[i]) + "\"", line);
    if (!detail::valid_lemma_token(verb_tokens[0]) || verb_tokens[0] == "person" ||
        verb_tokens[0] == "something")
        throw data_error("bad verb token \"" + std::string(verb_tokens[0]) + "\"", line);
    e.verb = std::string(verb_tokens[0]);
    if (verb_tokens.size() == 2) {
        if (!detail::valid_lemma_token(verb_tokens[1]))
            throw data_error("bad particle token \"" + std::string(verb_tokens[1]) + "\"", line);
        e.particle = std::string(verb_tokens[1]);
    }
    ++i;

    if (i < parts.size()) {
        if (!detail::valid_lemma_token(parts[i]))
            throw data_error("bad object token \"" + std::string(parts[i]) + "\"", line);
        e.object = object_ref::literal(parts[i]);
        ++i;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Event-stream file: one event mention per line,
//   doc_id TAB genre TAB index TAB subject TAB verb TAB particle TAB object
// with "-" marking an absent subject/particle/object.

inline void write_event_field(std::string& out, const event& e) {
    out += e.subject == arg_class::none ? "-" : detail::class_name(e.subject);
    out += '\t';
    out += e.verb;
    out += '\t';
    out += e.particle.empty() ? "-" : e.particle;
    out += '\t';
    if (e.object.empty())
        out += '-';
    else
        out += e.object.is_literal() ? e.object.lemma : detail::class_name(e.object.cls);
}

inline void save_event_stream(const std::vector<event_sequence>& sequences, std::ostream& os) {
    for (const auto& seq : sequences) {
        std::size_t index = 0;
        for (const auto& e : seq.events) {
            std::string line = seq.doc_id;
            line += '\t';
            line += seq.genre;
            line += '\t';
            line += std::to_string(index++);
            line += '\t';
            write_event_field(line, e);
            line += '\n';
            os << line;
        }
    }
}

// Groups records by doc_id (output sorted by doc_id) and orders each
// sequence by the per-document event index, whatever the file order was.
inline std::vector<event_sequence> load_event_stream(std::istream& is) {
    struct rec {
        std::uint64_t index;
        event e;
    };
    std::map<std::string, std::pair<std::string, std::vector<rec>>> by_doc;  // doc -> (genre, recs)

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, '\t');
        if (f.size() != 7) throw data_error("expected 7 tab-separated fields", lineno);

        std::uint64_t index = 0;
        if (f[0].empty()) throw data_error("empty doc_id", lineno);
        if (!parse_u64(f[2], index)) throw data_error("bad event index \"" + std::string(f[2]) + "\"", lineno);

        event e;
        if (f[3] == "-" || f[3] == "none")
            e.subject = arg_class::none;
        else if (f[3] == "person")
            e.subject = arg_class::person;
        else if (f[3] == "something")
            e.subject = arg_class::something;
        else
            throw data_error("unknown subject class \"" + std::string(f[3]) + "\"", lineno);

        if (!detail::valid_lemma_token(f[4]) || f[4] == "person" || f[4] == "something")
            throw data_error("bad verb \"" + std::string(f[4]) + "\"", lineno);
        e.verb = std::string(f[4]);
        if (f[5] != "-") {
            if (!detail::valid_lemma_token(f[5]))
                throw data_error("bad particle \"" + std::string(f[5]) + "\"", lineno);
            e.particle = std::string(f[5]);
        }
        if (f[6] != "-" && f[6] != "none") {
            if (!detail::valid_lemma_token(f[6]))
                throw data_error("bad object \"" + std::string(f[6]) + "\"", lineno);
            e.object = object_ref::literal(f[6]);
        }

        auto& slot = by_doc[std::string(f[0])];
        if (slot.second.empty())
            slot.first = std::string(f[1]);
        else if (slot.first != f[1])
            throw data_error("conflicting genre for doc \"" + std::string(f[0]) + "\"", lineno);
        for (const auto& r : slot.second)
            if (r.index == index)
                throw data_error("duplicate event index " + std::to_string(index) + " in doc \"" +
                                     std::string(f[0]) + "\"",
                                 lineno);
        slot.second.push_back({index, std::move(e)});
    }

    std::vector<event_sequence> out;
    out.reserve(by_doc.size());
    for (auto& [doc_id, slot] : by_doc) {
        std::sort(slot.second.begin(), slot.second.end(),
                  [](const rec& a, const rec& b) { return a.index < b.index; });
        event_sequence seq;
        seq.doc_id = doc_id;
        seq.genre = slot.first;
        seq.events.reserve(slot.second.size());
        for (auto& r : slot.second) seq.events.push_back(std::move(r.e));
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace cpmine
