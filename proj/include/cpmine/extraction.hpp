#pragma once

// Rule-based event extraction over description text.
//
// Text is tokenized and tagged with a coarse lexicon-plus-suffix tagger,
// then every non-stop verb token becomes an event tuple: the subject
// class comes from the nearest preceding nominal within the clause
// window (same sentence, at most 5 tokens away), a particle attaches
// when the verb is immediately followed by a particle-list token, and
// the object comes from the nearest following noun in the window.
// Pre-annotated token streams can bypass the tagger entirely; dialog
// segments are never read.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cpmine/corpus.hpp"
#include "cpmine/event.hpp"
#include "cpmine/util.hpp"

namespace cpmine {

enum class pos_tag : std::uint8_t { VERB, NOUN, PRON, PROPN, PART, OTHER };

struct annotated_token {
    std::string surface;
    std::string lemma;  // non-empty
    pos_tag pos = pos_tag::OTHER;
    std::size_t sentence = 0;
};

struct extraction_lexicons {
    std::unordered_set<std::string> person_words;
    std::unordered_set<std::string> stop_verbs;
    std::unordered_set<std::string> particles;
    std::unordered_set<std::string> verb_stems;
    std::unordered_set<std::string> pronouns;
    std::unordered_set<std::string> closed_words;              // determiners, prepositions, modals...
    std::unordered_map<std::string, std::string> irregular_verbs;  // surface form -> stem

    static extraction_lexicons builtin();
};

struct extraction_options {
    bool retain_object_lemmas = false;  // keep non-person noun lemmas instead of "something"
    int clause_window = 5;              // max token distance for argument attachment
};

namespace detail {

inline constexpr std::string_view kPronouns[] = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
    "myself", "yourself", "himself", "herself", "itself", "ourselves", "yourselves",
    "themselves", "someone", "somebody", "anyone", "anybody", "everyone", "everybody",
    "nobody", "who", "whom"};

inline constexpr std::string_view kParticles[] = {
    "up", "down", "out", "off", "on", "away", "back", "over",
    "around", "along", "apart", "forth", "aside", "together"};

inline constexpr std::string_view kClosedWords[] = {
    // determiners and quantifiers
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "its",
    "our", "their", "some", "any", "no", "each", "every", "all", "both", "few",
    "several", "many", "much", "more", "most", "other", "another", "such", "what",
    "which", "whose", "own", "same", "one", "two", "three",
    // prepositions and subordinators
    "of", "in", "to", "for", "with", "at", "by", "from", "into", "onto", "upon", "about",
    "above", "below", "under", "near", "between", "among", "against", "during",
    "without", "within", "behind", "beyond", "across", "toward", "towards", "inside",
    "outside", "until", "before", "after", "since", "through", "like", "except",
    // conjunctions, adverbs, negation, modals
    "and", "or", "but", "nor", "so", "yet", "if", "because", "although", "though",
    "while", "when", "where", "why", "how", "as", "than", "then", "now", "here",
    "there", "not", "never", "always", "often", "sometimes", "soon", "just", "very",
    "too", "also", "again", "once", "twice", "still", "already", "almost", "quite",
    "rather", "even", "only", "perhaps", "maybe", "later", "early", "suddenly",
    "quickly", "slowly", "finally", "instead", "however", "therefore",
    "will", "would", "can", "could", "shall", "should", "may", "might", "must"};

inline constexpr std::string_view kPersonWords[] = {
    "man", "men", "woman", "women", "boy", "girl", "child", "children", "guy", "lady",
    "gentleman", "person", "people", "friend", "family", "mother", "father", "mom",
    "dad", "mum", "parent", "brother", "sister", "son", "daughter", "husband", "wife",
    "uncle", "aunt", "cousin", "grandmother", "grandfather", "grandma", "grandpa",
    "kid", "baby", "toddler", "teenager", "adult", "stranger", "neighbor", "guest",
    "visitor", "guard", "soldier", "officer", "policeman", "cop", "detective",
    "doctor", "nurse", "teacher", "student", "waiter", "waitress", "bartender",
    "driver", "pilot", "captain", "sailor", "king", "queen", "prince", "princess",
    "knight", "wizard", "servant", "maid", "butler", "farmer", "hunter", "camper",
    "hiker", "thief", "killer", "victim", "witness", "judge", "lawyer", "priest",
    "monk", "clerk", "crowd", "couple", "group", "everybody", "local", "ranger"};

inline constexpr std::string_view kStopVerbs[] = {"be", "have", "do"};

inline constexpr std::string_view kVerbStems[] = {
    "be", "have", "do", "go", "come", "get", "make", "take", "give", "put", "keep",
    "let", "say", "tell", "ask", "answer", "call", "talk", "speak", "shout", "whisper",
    "scream", "yell", "see", "look", "watch", "stare", "glance", "gaze", "peer",
    "notice", "spot", "scan", "observe", "hear", "listen", "smell", "taste", "feel",
    "touch", "grab", "grip", "grasp", "clutch", "snatch", "seize", "hold", "squeeze",
    "release", "drop", "lift", "raise", "lower", "carry", "haul", "drag", "pull",
    "push", "shove", "throw", "toss", "fling", "hurl", "catch", "pack", "unpack",
    "load", "unload", "wrap", "unwrap", "fold", "unfold", "tie", "untie", "bind",
    "gag", "lock", "unlock", "open", "close", "shut", "slam", "knock", "bang", "tap",
    "pound", "hit", "strike", "beat", "kick", "punch", "slap", "block", "dodge",
    "duck", "swing", "miss", "aim", "shoot", "fire", "stab", "cut", "chop", "slice",
    "stir", "pour", "fill", "empty", "spill", "wipe", "wash", "clean", "scrub",
    "cook", "boil", "fry", "bake", "eat", "drink", "chew", "swallow", "bite", "sip",
    "walk", "run", "sprint", "jog", "march", "stroll", "wander", "stride", "step",
    "stumble", "trip", "slip", "slide", "fall", "tumble", "crawl", "climb", "jump",
    "leap", "hop", "land", "rise", "stand", "sit", "kneel", "crouch", "lean", "lie",
    "rest", "sleep", "wake", "dream", "stretch", "turn", "spin", "twist", "face",
    "move", "shift", "roll", "rock", "sway", "shake", "tremble", "shiver", "nod",
    "wave", "point", "gesture", "smile", "grin", "laugh", "giggle", "cry", "weep",
    "sob", "sigh", "gasp", "breathe", "cough", "frown", "blink", "wink", "swim",
    "dive", "float", "sink", "drown", "sail", "row", "paddle", "fish", "hunt",
    "chase", "follow", "lead", "guide", "escort", "meet", "greet", "hug", "kiss",
    "fight", "struggle", "wrestle", "attack", "defend", "escape", "flee", "hide",
    "seek", "search", "find", "discover", "explore", "reveal", "show", "display",
    "cover", "uncover", "bury", "dig", "plant", "build", "construct", "repair",
    "fix", "break", "smash", "crush", "tear", "rip", "burn", "light", "extinguish",
    "freeze", "melt", "start", "begin", "stop", "finish", "end", "continue", "pause",
    "wait", "stay", "remain", "leave", "depart", "arrive", "enter", "exit", "return",
    "head", "hike", "camp", "travel", "drive", "ride", "park", "fly", "soar", "crash",
    "swerve", "avoid", "slow", "speed", "race", "rush", "hurry", "approach", "reach",
    "pass", "cross", "send", "receive", "deliver", "fetch", "bring", "buy", "sell",
    "pay", "spend", "offer", "accept", "decline", "refuse", "choose", "pick", "pluck",
    "plunk", "gather", "collect", "set", "place", "lay", "arrange", "prepare",
    "decide", "plan", "try", "attempt", "manage", "fail", "succeed", "win", "lose",
    "play", "sing", "dance", "read", "write", "draw", "paint", "help", "save",
    "rescue", "protect", "warn", "threaten", "scare", "frighten", "surprise",
    "confuse", "disappear", "appear", "vanish", "emerge", "think", "know", "want",
    "need", "wish", "hope", "remember", "forget", "believe", "wonder", "realize",
    "understand", "learn", "teach", "work", "use", "wear", "dress", "undress",
    "button", "zip", "saddle", "mount", "dismount", "scratch", "claw", "rub", "pat",
    "stroke", "pet", "feed", "hand", "blow", "chat", "rummage", "sprawl", "spring", "creep",
    "sneak", "dart", "bolt", "charge", "retreat", "upload", "download",
    "record", "film", "snap", "flash", "signal", "ring", "buzz", "beep", "honk",
    "whistle", "hum", "growl", "bark", "roar", "hiss", "linger", "settle",
    "pitch", "stake", "anchor", "drift", "glide", "trek", "wade", "splash", "soak",
    "dry", "warm", "cool", "heat", "chill", "grill", "roast", "toast", "marinate",
    "season", "serve", "share", "split", "divide", "join", "connect",
    "attach", "detach", "hang", "suspend", "dangle", "balance", "steady",
    "perch"};

inline constexpr std::pair<std::string_view, std::string_view> kIrregularVerbs[] = {
    {"is", "be"},         {"are", "be"},        {"was", "be"},       {"were", "be"},
    {"been", "be"},       {"am", "be"},         {"being", "be"},     {"has", "have"},
    {"had", "have"},      {"having", "have"},   {"does", "do"},      {"did", "do"},
    {"done", "do"},       {"went", "go"},       {"gone", "go"},      {"goes", "go"},
    {"woke", "wake"},     {"woken", "wake"},    {"took", "take"},    {"taken", "take"},
    {"fell", "fall"},     {"fallen", "fall"},   {"sat", "sit"},      {"stood", "stand"},
    {"ran", "run"},       {"came", "come"},     {"left", "leave"},   {"got", "get"},
    {"gotten", "get"},    {"made", "make"},     {"began", "begin"},  {"begun", "begin"},
    {"broke", "break"},   {"broken", "break"},  {"brought", "bring"},{"built", "build"},
    {"caught", "catch"},  {"chose", "choose"},  {"chosen", "choose"},{"drank", "drink"},
    {"drunk", "drink"},   {"drove", "drive"},   {"driven", "drive"}, {"ate", "eat"},
    {"eaten", "eat"},     {"found", "find"},    {"flew", "fly"},     {"flown", "fly"},
    {"forgot", "forget"}, {"gave", "give"},     {"given", "give"},   {"grew", "grow"},
    {"grown", "grow"},    {"heard", "hear"},    {"held", "hold"},    {"hid", "hide"},
    {"hidden", "hide"},   {"kept", "keep"},     {"knew", "know"},    {"known", "know"},
    {"laid", "lay"},      {"led", "lead"},      {"lit", "light"},    {"lost", "lose"},
    {"met", "meet"},      {"paid", "pay"},      {"rode", "ride"},    {"ridden", "ride"},
    {"rose", "rise"},     {"risen", "rise"},    {"said", "say"},     {"saw", "see"},
    {"seen", "see"},      {"sent", "send"},     {"shook", "shake"},  {"shaken", "shake"},
    {"shot", "shoot"},    {"showed", "show"},   {"shown", "show"},   {"slept", "sleep"},
    {"spoke", "speak"},   {"spoken", "speak"},  {"spilt", "spill"},  {"sprang", "spring"},
    {"struck", "strike"}, {"swam", "swim"},     {"swum", "swim"},    {"swung", "swing"},
    {"told", "tell"},     {"thought", "think"}, {"threw", "throw"},  {"thrown", "throw"},
    {"understood", "understand"},               {"wore", "wear"},    {"worn", "wear"},
    {"won", "win"},       {"wrote", "write"},   {"written", "write"},{"dug", "dig"},
    {"slid", "slide"},    {"crept", "creep"},   {"knelt", "kneel"},  {"leapt", "leap"},
    {"bound", "bind"},    {"bent", "bend"},     {"fought", "fight"}, {"froze", "freeze"},
    {"frozen", "freeze"}, {"torn", "tear"},     {"tore", "tear"},    {"sank", "sink"},
    {"sunk", "sink"},     {"fled", "flee"},     {"blew", "blow"},    {"blown", "blow"}};

}  // namespace detail

inline extraction_lexicons extraction_lexicons::builtin() {
    extraction_lexicons lex;
    for (auto s : detail::kPronouns) lex.pronouns.emplace(s);
    for (auto s : detail::kParticles) lex.particles.emplace(s);
    for (auto s : detail::kClosedWords) lex.closed_words.emplace(s);
    for (auto s : detail::kPersonWords) lex.person_words.emplace(s);
    for (auto s : detail::kStopVerbs) lex.stop_verbs.emplace(s);
    for (auto s : detail::kVerbStems) lex.verb_stems.emplace(s);
    for (auto [form, stem] : detail::kIrregularVerbs) lex.irregular_verbs.emplace(form, stem);
    return lex;
}

// Lexicon files: one lemma per line, "#" starts a comment.
inline void load_lexicon_file(std::istream& is, std::unordered_set<std::string>& into) {
    std::string line;
    while (std::getline(is, line)) {
        std::string_view s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        into.emplace(to_lower(s));
    }
}

namespace detail {

// Recovers a verb stem from an inflected surface form, empty if none.
inline std::string verb_lemma(const std::string& low, const extraction_lexicons& lex) {
    if (auto it = lex.irregular_verbs.find(low); it != lex.irregular_verbs.end())
        return it->second;
    if (lex.verb_stems.count(low)) return low;

    auto in_stems = [&](std::string s) -> std::string {
        return lex.verb_stems.count(s) ? s : std::string();
    };
    auto dedoubled = [](std::string_view s) -> std::string {
        if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) return std::string(s.substr(0, s.size() - 1));
        return {};
    };

    std::size_t n = low.size();
    if (n > 4 && low.ends_with("ing")) {
        std::string base = low.substr(0, n - 3);
        if (auto s = in_stems(base); !s.empty()) return s;
        if (auto s = in_stems(base + "e"); !s.empty()) return s;  // taking -> take
        if (auto d = dedoubled(base); !d.empty())
            if (auto s = in_stems(d); !s.empty()) return s;  // setting -> set
    }
    if (n > 4 && low.ends_with("ied")) {
        if (auto s = in_stems(low.substr(0, n - 3) + "y"); !s.empty()) return s;  // carried -> carry
    }
    if (n > 3 && low.ends_with("ed")) {
        std::string base = low.substr(0, n - 2);
        if (auto s = in_stems(base); !s.empty()) return s;  // packed -> pack
        if (auto d = dedoubled(base); !d.empty())
            if (auto s = in_stems(d); !s.empty()) return s;  // grabbed -> grab
        if (auto s = in_stems(low.substr(0, n - 1)); !s.empty()) return s;  // placed -> place
    }
    if (n > 4 && low.ends_with("ies")) {
        if (auto s = in_stems(low.substr(0, n - 3) + "y"); !s.empty()) return s;  // carries -> carry
    }
    if (n > 3 && low.ends_with("es")) {
        if (auto s = in_stems(low.substr(0, n - 2)); !s.empty()) return s;  // pushes -> push
    }
    if (n > 2 && low.ends_with("s")) {
        if (auto s = in_stems(low.substr(0, n - 1)); !s.empty()) return s;  // grabs -> grab
    }
    return {};
}

inline std::string noun_lemma(const std::string& low) {
    std::size_t n = low.size();
    if (n > 4 && low.ends_with("ies")) return low.substr(0, n - 3) + "y";
    if (n > 4 && (low.ends_with("ses") || low.ends_with("xes") || low.ends_with("zes") ||
                  low.ends_with("ches") || low.ends_with("shes")))
        return low.substr(0, n - 2);
    if (n > 3 && low.ends_with("s") && !low.ends_with("ss") && !low.ends_with("us") &&
        !low.ends_with("is"))
        return low.substr(0, n - 1);
    return low;
}

inline std::string strip_possessive(std::string_view word) {
    if (word.size() > 2 && word.ends_with("'s")) return std::string(word.substr(0, word.size() - 2));
    if (word.size() > 4 && word.ends_with("\xE2\x80\x99s"))
        return std::string(word.substr(0, word.size() - 4));
    if (word.size() > 1 && word.back() == '\'') return std::string(word.substr(0, word.size() - 1));
    return std::string(word);
}

}  // namespace detail

// Tokenizes and tags one text block.  Word tokens only; sentence-final
// punctuation advances the sentence counter, all other punctuation is
// dropped.
inline std::vector<annotated_token> annotate_text(std::string_view text,
                                                  const extraction_lexicons& lex) {
    std::vector<annotated_token> out;
    std::size_t sentence = 0;
    bool sentence_initial = true;

    std::size_t i = 0;
    auto word_char = [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '\'' || c == '-' ||
               c >= 0x80;  // keep UTF-8 continuation bytes inside tokens
    };
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '.' || c == '!' || c == '?') {
            sentence_initial = true;
            ++sentence;
            while (i < text.size() && (text[i] == '.' || text[i] == '!' || text[i] == '?')) ++i;
            continue;
        }
        if (!word_char(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && word_char(static_cast<unsigned char>(text[i]))) ++i;
        std::string_view raw = text.substr(start, i - start);

        std::string base = detail::strip_possessive(raw);
        if (base.empty()) continue;
        std::string low = to_lower(base);

        annotated_token tok;
        tok.surface = std::string(raw);
        tok.sentence = sentence;
        bool capitalized = std::isupper(static_cast<unsigned char>(base[0])) != 0;

        if (lex.pronouns.count(low)) {
            tok.pos = pos_tag::PRON;
            tok.lemma = low;
        } else if (lex.particles.count(low)) {
            tok.pos = pos_tag::PART;
            tok.lemma = low;
        } else if (lex.closed_words.count(low)) {
            tok.pos = pos_tag::OTHER;
            tok.lemma = low;
        } else if (capitalized && !sentence_initial) {
            tok.pos = pos_tag::PROPN;
            tok.lemma = low;
        } else if (std::string stem = detail::verb_lemma(low, lex); !stem.empty()) {
            tok.pos = pos_tag::VERB;
            tok.lemma = stem;
        } else if (capitalized) {
            tok.pos = pos_tag::PROPN;
            tok.lemma = low;
        } else if (std::isalpha(static_cast<unsigned char>(base[0]))) {
            tok.pos = pos_tag::NOUN;
            tok.lemma = detail::noun_lemma(low);
        } else {
            tok.pos = pos_tag::OTHER;
            tok.lemma = low;
        }
        out.push_back(std::move(tok));
        sentence_initial = false;
    }
    return out;
}

// Event extraction from an already-annotated token stream.
inline std::vector<event> extract_from_tokens(std::span<const annotated_token> tokens,
                                              const extraction_lexicons& lex,
                                              const extraction_options& opt = {}) {
    std::vector<event> events;
    const std::ptrdiff_t window = opt.clause_window;

    for (std::ptrdiff_t i = 0; i < std::ssize(tokens); ++i) {
        const auto& t = tokens[i];
        if (t.pos != pos_tag::VERB || lex.stop_verbs.count(t.lemma)) continue;

        event e;
        e.verb = t.lemma;

        for (std::ptrdiff_t k = i - 1; k >= 0 && k >= i - window; --k) {
            const auto& c = tokens[k];
            if (c.sentence != t.sentence) break;
            if (c.pos == pos_tag::PRON || c.pos == pos_tag::PROPN) {
                e.subject = arg_class::person;
                break;
            }
            if (c.pos == pos_tag::NOUN) {
                e.subject = lex.person_words.count(c.lemma) ? arg_class::person
                                                            : arg_class::something;
                break;
            }
        }

        std::ptrdiff_t obj_start = i + 1;
        if (i + 1 < std::ssize(tokens) && tokens[i + 1].sentence == t.sentence &&
            tokens[i + 1].pos == pos_tag::PART) {
            e.particle = tokens[i + 1].lemma;
            obj_start = i + 2;
        }

        for (std::ptrdiff_t k = obj_start; k < std::ssize(tokens) && k <= i + window; ++k) {
            const auto& c = tokens[k];
            if (c.sentence != t.sentence) break;
            if (c.pos == pos_tag::NOUN) {
                if (lex.person_words.count(c.lemma))
                    e.object = object_ref::person();
                else if (opt.retain_object_lemmas)
                    e.object = object_ref::literal(c.lemma);
                else
                    e.object = object_ref::something();
                break;
            }
        }
        events.push_back(std::move(e));
    }
    return events;
}

inline event_sequence extract_events(const document& doc, const extraction_lexicons& lex,
                                     const extraction_options& opt = {}) {
    event_sequence seq;
    seq.doc_id = doc.doc_id;
    seq.genre = doc.genre;
    for (const auto& seg : doc.segments) {
        if (seg.chan != channel::description) continue;
        auto tokens = annotate_text(seg.text, lex);
        auto events = extract_from_tokens(tokens, lex, opt);
        seq.events.insert(seq.events.end(), std::make_move_iterator(events.begin()),
                          std::make_move_iterator(events.end()));
    }
    return seq;
}

}  // namespace cpmine
