#include "botdetect/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "botdetect/defaults.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

std::vector<RawDocument> read_raw_corpus(std::istream& in) {
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw FormatError("corpus line " + std::to_string(line_no) + ": expected 'doc_id<TAB>text'");
        }
        RawDocument d{line.substr(0, tab), line.substr(tab + 1)};
        if (!ids.insert(d.id).second) {
            throw FormatError("corpus line " + std::to_string(line_no) + ": duplicate doc_id '" + d.id + "'");
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

void write_raw_corpus(std::ostream& out, std::span<const RawDocument> docs) {
    for (const auto& d : docs) out << d.id << '\t' << text::tsv_safe(d.text) << '\n';
}

std::unordered_set<std::string> PreprocessOptions::default_stopwords() {
    std::unordered_set<std::string> out;
    for (auto w : text::split_whitespace(defaults::stopwords())) {
        if (w.front() != '#') out.emplace(w);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text_in, const PreprocessOptions& options) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= options.min_token_length && !options.stopwords.contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char c : text_in) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            cur += static_cast<char>(std::tolower(u));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::size_t Corpus::token_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.tokens.size();
    return n;
}

void Corpus::validate() const {
    std::unordered_set<std::string> ids;
    for (const auto& d : documents) {
        if (!ids.insert(d.id).second) throw FormatError("duplicate doc_id '" + d.id + "'");
        if (d.tokens.empty()) throw FormatError("document '" + d.id + "' is empty");
        for (auto t : d.tokens) {
            if (t >= vocabulary.size()) throw FormatError("document '" + d.id + "' has an out-of-range token");
        }
    }
}

Corpus build_corpus(std::span<const RawDocument> docs, const PreprocessOptions& options, CorpusBuildReport* report) {
    std::vector<std::vector<std::string>> tokenized;
    tokenized.reserve(docs.size());
    std::map<std::string, std::size_t> doc_freq;
    for (const auto& d : docs) {
        tokenized.push_back(tokenize(d.text, options));
        std::set<std::string> uniq(tokenized.back().begin(), tokenized.back().end());
        for (const auto& w : uniq) ++doc_freq[w];
    }

    Corpus corpus;
    std::size_t rare = 0;
    for (const auto& [w, df] : doc_freq) {
        if (df >= options.min_document_frequency) {
            corpus.vocabulary.push_back(w);
        } else {
            ++rare;
        }
    }
    const auto index = vocabulary_index(corpus.vocabulary);
    std::size_t empty = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        Document d{docs[i].id, encode_tokens(tokenized[i], index)};
        if (d.tokens.empty()) {
            ++empty;
            continue;
        }
        corpus.documents.push_back(std::move(d));
    }
    if (report) *report = CorpusBuildReport{docs.size(), empty, rare};
    return corpus;
}

std::vector<std::uint32_t> encode_tokens(std::span<const std::string> tokens,
                                         const std::unordered_map<std::string, std::uint32_t>& index) {
    std::vector<std::uint32_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (auto it = index.find(t); it != index.end()) out.push_back(it->second);
    }
    return out;
}

std::unordered_map<std::string, std::uint32_t> vocabulary_index(std::span<const std::string> vocabulary) {
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(vocabulary.size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i) index.emplace(vocabulary[i], static_cast<std::uint32_t>(i));
    return index;
}

}  // namespace botdetect
