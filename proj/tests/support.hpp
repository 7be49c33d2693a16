#pragma once

// Shared test helpers: seeded random corpora, quick event construction,
// temp files, fixture lookup.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpmine/event.hpp"
#include "cpmine/rng.hpp"

namespace testsupport {

inline cpmine::event ev(const std::string& canonical) { return cpmine::parse_canonical(canonical); }

// Uniform random corpus over a small vocabulary of verb-only events.
inline std::vector<cpmine::event_sequence> random_corpus(std::uint64_t seed, int max_docs,
                                                         int max_len, int vocab,
                                                         const std::string& genre = "test") {
    cpmine::rng_engine rng(seed);
    int docs = 1 + static_cast<int>(cpmine::bounded(rng, static_cast<std::uint64_t>(max_docs)));
    std::vector<cpmine::event_sequence> corpus;
    for (int d = 0; d < docs; ++d) {
        cpmine::event_sequence seq;
        seq.doc_id = "doc-" + std::to_string(d);
        seq.genre = genre;
        int len = static_cast<int>(cpmine::bounded(rng, static_cast<std::uint64_t>(max_len) + 1));
        for (int i = 0; i < len; ++i) {
            cpmine::event e;
            e.verb = "v" + std::to_string(cpmine::bounded(rng, static_cast<std::uint64_t>(vocab)));
            seq.events.push_back(std::move(e));
        }
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

// Sequence of verb-only events from single-letter names, e.g. "A B C".
inline cpmine::event_sequence seq_of(const std::string& doc_id, const std::string& names,
                                     const std::string& genre = "test") {
    cpmine::event_sequence seq;
    seq.doc_id = doc_id;
    seq.genre = genre;
    std::istringstream in(names);
    std::string tok;
    while (in >> tok) {
        cpmine::event e;
        for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        e.verb = tok;
        seq.events.push_back(std::move(e));
    }
    return seq;
}

inline std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("CPMINE_FIXTURE_DIR")) return env;
    return std::filesystem::path(__FILE__).parent_path() / "fixtures";
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class temp_dir {
public:
    explicit temp_dir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("cpmine-test-" + tag + "-" + std::to_string(++counter) + "-" +
                 std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
