#include "evotree/corpus.hpp"

#include <gtest/gtest.h>

#include "evotree/errors.hpp"
#include "support/builders.hpp"

namespace evotree {
namespace {

using testsupport::paper;

Corpus small_corpus() {
  Corpus corpus;
  PaperNode p1 = paper("p1", 2015);
  p1.title = "Neural machine translation by attention";
  p1.abstract = "We align and translate jointly.";
  corpus.papers["p1"] = p1;
  PaperNode p2 = paper("p2", 2017);
  p2.title = "Convolutional sequence learning";
  corpus.papers["p2"] = p2;

  SurveyDoc survey;
  survey.id = "s1";
  survey.title = "A survey of translation";
  survey.paragraphs = {"Attention changed translation. Models align words."};
  survey.sentences = {
      {"Attention changed translation.", "Models align words."}};
  survey.references = {"[1] A. Author, \"Neural machine translation by "
                       "attention,\" in Proc. X, 2015."};
  corpus.surveys.push_back(survey);

  SentenceCitationPair pair;
  pair.survey_id = "s1";
  pair.paragraph_index = 0;
  pair.sentence_index = 0;
  pair.sentence_text = "Attention changed translation.";
  pair.cited_paper_ids = {"p1"};
  corpus.pairs.push_back(pair);

  ConceptNode cnode;
  cnode.id = "c1";
  cnode.statement = "Attention enables alignment";
  cnode.survey_id = "s1";
  cnode.paragraph_index = 0;
  cnode.linked_paper_ids = {"p1"};
  corpus.concepts.push_back(cnode);
  return corpus;
}

TEST(SplitSentences, BasicAndAbbreviations) {
  EXPECT_EQ(split_sentences("One thing. Another thing."),
            (std::vector<std::string>{"One thing.", "Another thing."}));
  EXPECT_EQ(split_sentences("Smith et al. proposed attention. It works."),
            (std::vector<std::string>{"Smith et al. proposed attention.",
                                      "It works."}));
  // A single capital before the period reads as an initial, not a boundary.
  EXPECT_EQ(split_sentences("J. Smith wrote the book."),
            (std::vector<std::string>{"J. Smith wrote the book."}));
  EXPECT_EQ(split_sentences("See Fig. 3 for details. Results follow."),
            (std::vector<std::string>{"See Fig. 3 for details.",
                                      "Results follow."}));
  EXPECT_EQ(split_sentences("A. Author wrote this. B. Author agreed."),
            (std::vector<std::string>{"A. Author wrote this.",
                                      "B. Author agreed."}));
  EXPECT_EQ(split_sentences("Accuracy hit 99.5 percent. Costs fell."),
            (std::vector<std::string>{"Accuracy hit 99.5 percent.",
                                      "Costs fell."}));
  EXPECT_EQ(split_sentences("Does it work? Yes! Quite well."),
            (std::vector<std::string>{"Does it work?", "Yes!", "Quite well."}));
  EXPECT_TRUE(split_sentences("   ").empty());
}

TEST(SplitParagraphs, BlankLineDelimited) {
  std::string text = "First paragraph line one.\nline two.\n\n\nSecond one.\n";
  std::vector<std::string> paragraphs = split_paragraphs(text);
  ASSERT_EQ(paragraphs.size(), 2u);
  EXPECT_EQ(paragraphs[0], "First paragraph line one. line two.");
  EXPECT_EQ(paragraphs[1], "Second one.");
}

TEST(Corpus, DocumentForPaperMergesOwnTextAndCitingSentences) {
  Corpus corpus = small_corpus();
  Document doc = corpus.document("p1");
  ASSERT_EQ(doc.passages.size(), 3u);
  EXPECT_EQ(doc.passages[0], "Neural machine translation by attention.");
  EXPECT_EQ(doc.passages[1], "We align and translate jointly.");
  EXPECT_EQ(doc.passages[2], "Attention changed translation.");
}

TEST(Corpus, DocumentForSurveyFlattensSentences) {
  Corpus corpus = small_corpus();
  Document doc = corpus.document("s1");
  EXPECT_EQ(doc.passages.size(), 2u);
}

TEST(Corpus, UnknownDocumentRejected) {
  EXPECT_THROW(small_corpus().document("ghost"), EmptyDocumentError);
}

TEST(Corpus, ValidateCleanFixture) {
  EXPECT_TRUE(small_corpus().validate().empty());
}

TEST(Corpus, ValidateFlagsBrokenReferences) {
  Corpus corpus = small_corpus();
  corpus.pairs[0].cited_paper_ids = {"ghost"};
  corpus.concepts[0].survey_id = "nowhere";
  std::vector<std::string> problems = corpus.validate();
  EXPECT_EQ(problems.size(), 2u);
}

TEST(Corpus, JsonlRoundTripIsIdentity) {
  Corpus corpus = small_corpus();
  std::string jsonl = corpus_to_jsonl(corpus);
  Corpus back = corpus_from_jsonl(jsonl);
  EXPECT_EQ(corpus, back);
  EXPECT_EQ(jsonl, corpus_to_jsonl(back));
}

TEST(Corpus, JsonlErrorsCarryLinePath) {
  try {
    corpus_from_jsonl(R"({"type":"paper","id":"x"})");
    FAIL() << "expected SchemaViolationError";
  } catch (const SchemaViolationError& e) {
    EXPECT_EQ(e.path(), "line[1].title");
  }
  EXPECT_THROW(corpus_from_jsonl("{\"type\":\"mystery\"}"),
               SchemaViolationError);
  EXPECT_THROW(corpus_from_jsonl("not json"), SchemaViolationError);
}

TEST(Corpus, LoadRejectsMissingFile) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), UnreadableFileError);
}

}  // namespace
}  // namespace evotree
