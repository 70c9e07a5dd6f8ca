#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evotree/corpus.hpp"
#include "evotree/oracle.hpp"
#include "evotree/types.hpp"

namespace evotree {

enum class RefStyle {
  ieee,
  apa,
  auto_detect,
};

/// One raw bibliography entry and what became of it. Entries keep their
/// position so numeric citation markers ([7] = entries[6]) stay resolvable
/// even when some entries fail to parse.
struct ReferenceEntry {
  int index = 0;
  std::string raw;
  std::optional<PaperNode> paper;
  std::string diagnostic;  // empty on success
};

struct ParsedReferences {
  std::vector<ReferenceEntry> entries;

  std::vector<PaperNode> papers() const;
  std::vector<std::string> diagnostics() const;
};

/// Splits the block into entries (one per non-empty line) and parses each.
/// Title and year are required; authors and venue are best effort. Entries
/// that cannot be parsed carry a diagnostic instead of a paper — nothing is
/// silently dropped. Throws std::invalid_argument on an empty block.
ParsedReferences parse_references(const std::string& reference_block,
                                  RefStyle style = RefStyle::auto_detect);

/// Stable paper id derived from the deduplication key (normalized title+year).
std::string paper_id_for(const std::string& title, int year);

struct PairingOptions {
  int min_tokens = 5;             // shorter sentences are invalid facts
  bool drop_pure_citations = true;
};

struct PairingResult {
  std::vector<SentenceCitationPair> pairs;
  std::vector<std::string> diagnostics;
};

/// Links every sentence containing a recognized citation marker — "[3]",
/// "[1,4]", "[2-5]", "(Surname, 2019)", "(Surname et al., 2019)" — to the
/// papers those markers resolve against in `refs`. Marker text is stripped
/// from sentence_text. Sentences whose markers all fail to resolve, or that
/// fail the invalid-fact filters, are excluded with diagnostics.
PairingResult pair_sentences_citations(const SurveyDoc& survey,
                                       const ParsedReferences& refs,
                                       const PairingOptions& options = {});

/// One ConceptNode per oracle-extracted statement per paragraph; concepts of
/// a citing paragraph link to the paper ids its sentences cite.
std::vector<ConceptNode> extract_concepts(
    const SurveyDoc& survey, const std::vector<SentenceCitationPair>& pairs,
    Oracle& oracle);

/// Parses a plain-text/markdown survey: first non-empty line is the title,
/// a "References" heading starts the bibliography, blank lines delimit
/// paragraphs.
SurveyDoc survey_from_text(const std::string& id, const std::string& text);

/// Full pipeline over survey files: segment, parse references, pair
/// citations, extract concepts, and merge into one corpus (papers deduplicated
/// by normalized title+year). Deterministic for a deterministic oracle.
/// Throws UnreadableFileError; per-entry diagnostics are appended to
/// *diagnostics when given.
Corpus build_corpus(const std::vector<std::string>& survey_files,
                    Oracle& oracle,
                    std::vector<std::string>* diagnostics = nullptr);

}  // namespace evotree
