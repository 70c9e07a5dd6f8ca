#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "evotree/types.hpp"

namespace evotree {

struct SurveyDoc {
  std::string id;
  std::string title;
  std::vector<std::string> paragraphs;
  // sentences[p] lists paragraph p's sentences in order.
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> references;  // raw entries, as printed

  bool operator==(const SurveyDoc&) const = default;
};

struct SentenceCitationPair {
  std::string survey_id;
  int paragraph_index = 0;
  int sentence_index = 0;
  std::string sentence_text;  // citation markers stripped
  std::vector<std::string> cited_paper_ids;

  bool operator==(const SentenceCitationPair&) const = default;
};

struct ConceptNode {
  std::string id;
  std::string statement;
  std::string survey_id;
  int paragraph_index = 0;
  std::vector<std::string> linked_paper_ids;

  bool operator==(const ConceptNode&) const = default;
};

/// A document ready for passage retrieval.
struct Document {
  std::string id;
  std::vector<std::string> passages;
};

struct Corpus {
  std::vector<SurveyDoc> surveys;  // kept sorted by id
  std::map<std::string, PaperNode> papers;
  std::vector<ConceptNode> concepts;
  std::vector<SentenceCitationPair> pairs;

  bool has_document(const std::string& doc_id) const;

  /// Retrieval view of a paper or survey. For a paper: the sentences of its
  /// title + abstract followed by every survey sentence citing it (ordered by
  /// survey, paragraph, sentence). For a survey: its sentences in order.
  /// Throws EmptyDocumentError for unknown ids or documents with no text.
  Document document(const std::string& doc_id) const;

  /// Referential-integrity diagnostics; empty means every id resolves and
  /// paragraph/sentence indices are dense.
  std::vector<std::string> validate() const;

  bool operator==(const Corpus&) const = default;
};

/// JSONL with one record per line, record types
/// survey_meta | paper | concept | pair, sorted deterministically so equal
/// corpora serialize to equal bytes.
std::string corpus_to_jsonl(const Corpus& corpus);
Corpus corpus_from_jsonl(const std::string& text);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

/// Sentence splitter shared by ingestion and retrieval: splits on . ! ?
/// followed by whitespace and an uppercase/utf8 start, with a whitelist of
/// common abbreviations (e.g., "et al.", "Fig.", "vs.") that never end a
/// sentence.
std::vector<std::string> split_sentences(const std::string& text);

/// Blank-line-delimited paragraphs, trimmed, empties dropped.
std::vector<std::string> split_paragraphs(const std::string& text);

}  // namespace evotree
