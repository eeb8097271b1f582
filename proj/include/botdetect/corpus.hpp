#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace botdetect {

struct RawDocument {
    std::string id;
    std::string text;
};

/// Corpus file: one `doc_id<TAB>raw text` per line. Duplicate ids are an error.
std::vector<RawDocument> read_raw_corpus(std::istream& in);
void write_raw_corpus(std::ostream& out, std::span<const RawDocument> docs);

struct PreprocessOptions {
    std::size_t min_token_length = 3;
    std::size_t min_document_frequency = 2;
    std::unordered_set<std::string> stopwords = default_stopwords();

    static std::unordered_set<std::string> default_stopwords();
};

/// Lowercases, splits on non-alphanumerics and drops short tokens and
/// stop words.
std::vector<std::string> tokenize(std::string_view text, const PreprocessOptions& options);

struct Document {
    std::string id;
    std::vector<std::uint32_t> tokens;  // indexes into Corpus::vocabulary
};

struct Corpus {
    std::vector<std::string> vocabulary;  // sorted, unique
    std::vector<Document> documents;

    std::size_t token_count() const;
    /// Throws FormatError when a token index is out of range, an id repeats
    /// or a document is empty.
    void validate() const;
};

struct CorpusBuildReport {
    std::size_t input_documents = 0;
    std::size_t empty_documents_dropped = 0;
    std::size_t rare_terms_dropped = 0;
};

/// Tokenizes every document, drops terms seen in fewer than
/// min_document_frequency documents and then documents left empty.
Corpus build_corpus(std::span<const RawDocument> docs, const PreprocessOptions& options = {},
                    CorpusBuildReport* report = nullptr);

/// Maps tokens onto an existing vocabulary, dropping unknown words.
std::vector<std::uint32_t> encode_tokens(std::span<const std::string> tokens,
                                         const std::unordered_map<std::string, std::uint32_t>& index);
std::unordered_map<std::string, std::uint32_t> vocabulary_index(std::span<const std::string> vocabulary);

}  // namespace botdetect
