#include "evotree/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "evotree/errors.hpp"

namespace evotree {
namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> kAbbrev = {
      "al.",   "et.",  "e.g.", "i.e.",  "cf.",   "vs.",  "etc.", "Fig.",
      "Figs.", "Eq.",  "Eqs.", "Sec.",  "Secs.", "Ref.", "Refs.", "Tab.",
      "Dr.",   "Mr.",  "Ms.",  "Mrs.",  "Prof.", "No.",  "Vol.", "pp.",
      "p.",    "ca.",  "Ch.",  "Univ.",
  };
  return kAbbrev;
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

bool sentence_can_start(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || c == '[' || c == '(' ||
         c == '"' || u >= 0x80;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    current.push_back(c);
    bool terminator = c == '.' || c == '!' || c == '?';
    if (terminator) {
      // Look ahead: a break needs whitespace then a plausible sentence start.
      std::size_t j = i + 1;
      while (j < n && (text[j] == ' ' || text[j] == '\t')) ++j;
      bool at_end = j >= n || text[j] == '\n';
      bool starts_next = j < n && j > i + 1 && sentence_can_start(text[j]);
      bool breaks = at_end || starts_next;
      if (breaks && c == '.') {
        // Word ending at this period, e.g. "al." in "et al."
        std::size_t word_start = current.find_last_of(" \t\n");
        std::string word = word_start == std::string::npos
                               ? current
                               : current.substr(word_start + 1);
        if (abbreviations().count(word)) breaks = false;
        // Single-letter initials: "A. Author".
        if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) {
          breaks = false;
        }
      }
      if (breaks) {
        std::string sentence = trim(current);
        if (!sentence.empty()) out.push_back(sentence);
        current.clear();
      }
    }
    ++i;
  }
  std::string rest = trim(current);
  if (!rest.empty()) out.push_back(rest);
  return out;
}

std::vector<std::string> split_paragraphs(const std::string& text) {
  std::vector<std::string> out;
  std::string block;
  std::istringstream lines(text);
  std::string line;
  auto flush = [&] {
    std::string paragraph = trim(block);
    if (!paragraph.empty()) out.push_back(paragraph);
    block.clear();
  };
  while (std::getline(lines, line)) {
    if (trim(line).empty()) {
      flush();
    } else {
      if (!block.empty()) block += ' ';
      block += trim(line);
    }
  }
  flush();
  return out;
}

bool Corpus::has_document(const std::string& doc_id) const {
  if (papers.count(doc_id)) return true;
  return std::any_of(surveys.begin(), surveys.end(),
                     [&](const SurveyDoc& s) { return s.id == doc_id; });
}

Document Corpus::document(const std::string& doc_id) const {
  Document doc;
  doc.id = doc_id;
  auto paper = papers.find(doc_id);
  if (paper != papers.end()) {
    for (const std::string& sentence :
         split_sentences(node_statement(paper->second))) {
      doc.passages.push_back(sentence);
    }
    std::vector<const SentenceCitationPair*> citing;
    for (const SentenceCitationPair& pair : pairs) {
      for (const std::string& id : pair.cited_paper_ids) {
        if (id == doc_id) {
          citing.push_back(&pair);
          break;
        }
      }
    }
    std::sort(citing.begin(), citing.end(), [](const auto* a, const auto* b) {
      return std::tie(a->survey_id, a->paragraph_index, a->sentence_index) <
             std::tie(b->survey_id, b->paragraph_index, b->sentence_index);
    });
    for (const SentenceCitationPair* pair : citing) {
      doc.passages.push_back(pair->sentence_text);
    }
  } else {
    auto survey = std::find_if(surveys.begin(), surveys.end(),
                               [&](const SurveyDoc& s) { return s.id == doc_id; });
    if (survey == surveys.end()) {
      throw EmptyDocumentError("unknown document id: " + doc_id);
    }
    for (const auto& paragraph : survey->sentences) {
      for (const std::string& sentence : paragraph) {
        doc.passages.push_back(sentence);
      }
    }
  }
  if (doc.passages.empty()) {
    throw EmptyDocumentError("document " + doc_id + " has no passages");
  }
  return doc;
}

std::vector<std::string> Corpus::validate() const {
  std::vector<std::string> problems;
  std::set<std::string> survey_ids;
  std::map<std::string, const SurveyDoc*> survey_by_id;
  for (const SurveyDoc& survey : surveys) {
    if (!survey_ids.insert(survey.id).second) {
      problems.push_back("duplicate survey id " + survey.id);
    }
    survey_by_id[survey.id] = &survey;
    if (survey.sentences.size() != survey.paragraphs.size()) {
      problems.push_back("survey " + survey.id +
                         " sentence table does not match paragraphs");
    }
  }
  for (const auto& [id, node] : papers) {
    if (id != node.id) {
      problems.push_back("paper keyed " + id + " holds node " + node.id);
    }
    if (node.title.empty()) problems.push_back("paper " + id + " has no title");
  }
  std::set<std::string> concept_ids;
  for (const ConceptNode& cnode : concepts) {
    if (!concept_ids.insert(cnode.id).second) {
      problems.push_back("duplicate concept id " + cnode.id);
    }
    if (cnode.statement.empty()) {
      problems.push_back("concept " + cnode.id + " has empty statement");
    }
    auto survey = survey_by_id.find(cnode.survey_id);
    if (survey == survey_by_id.end()) {
      problems.push_back("concept " + cnode.id + " cites unknown survey " +
                         cnode.survey_id);
    } else if (cnode.paragraph_index < 0 ||
               static_cast<std::size_t>(cnode.paragraph_index) >=
                   survey->second->paragraphs.size()) {
      problems.push_back("concept " + cnode.id +
                         " points at missing paragraph");
    }
    for (const std::string& paper_id : cnode.linked_paper_ids) {
      if (!papers.count(paper_id)) {
        problems.push_back("concept " + cnode.id + " links unknown paper " +
                           paper_id);
      }
    }
  }
  for (const SentenceCitationPair& pair : pairs) {
    std::string label = pair.survey_id + "[" +
                        std::to_string(pair.paragraph_index) + "][" +
                        std::to_string(pair.sentence_index) + "]";
    auto survey = survey_by_id.find(pair.survey_id);
    if (survey == survey_by_id.end()) {
      problems.push_back("pair " + label + " cites unknown survey");
      continue;
    }
    const SurveyDoc& doc = *survey->second;
    if (pair.paragraph_index < 0 ||
        static_cast<std::size_t>(pair.paragraph_index) >= doc.sentences.size() ||
        pair.sentence_index < 0 ||
        static_cast<std::size_t>(pair.sentence_index) >=
            doc.sentences[pair.paragraph_index].size()) {
      problems.push_back("pair " + label + " points at missing sentence");
    }
    if (pair.cited_paper_ids.empty()) {
      problems.push_back("pair " + label + " cites no papers");
    }
    for (const std::string& paper_id : pair.cited_paper_ids) {
      if (!papers.count(paper_id)) {
        problems.push_back("pair " + label + " cites unknown paper " + paper_id);
      }
    }
  }
  return problems;
}

namespace {

ordered_json importance_json(const std::optional<ImportanceScore>& importance) {
  if (!importance.has_value()) return nullptr;
  ordered_json j;
  j["graph"] = importance->graph_score;
  j["llm"] = importance->llm_score;
  j["gamma"] = importance->gamma;
  j["combined"] = importance->combined;
  return j;
}

const ordered_json& require(const ordered_json& j, const char* field,
                            const std::string& path) {
  if (!j.contains(field)) {
    throw SchemaViolationError(path + "." + field, "missing field");
  }
  return j[field];
}

std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaViolationError(path, "expected string");
  return j.get<std::string>();
}

int as_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaViolationError(path, "expected integer");
  return j.get<int>();
}

double as_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaViolationError(path, "expected number");
  return j.get<double>();
}

std::vector<std::string> as_string_list(const ordered_json& j,
                                        const std::string& path) {
  if (!j.is_array()) throw SchemaViolationError(path, "expected array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  std::vector<const SurveyDoc*> surveys;
  for (const SurveyDoc& survey : corpus.surveys) surveys.push_back(&survey);
  std::sort(surveys.begin(), surveys.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  for (const SurveyDoc* survey : surveys) {
    ordered_json j;
    j["type"] = "survey_meta";
    j["id"] = survey->id;
    j["title"] = survey->title;
    j["paragraphs"] = survey->paragraphs;
    j["sentences"] = survey->sentences;
    j["references"] = survey->references;
    out << j.dump() << "\n";
  }
  for (const auto& [id, paper] : corpus.papers) {
    ordered_json j;
    j["type"] = "paper";
    j["id"] = paper.id;
    j["title"] = paper.title;
    j["abstract"] = paper.abstract;
    j["authors"] = paper.authors;
    j["venue"] = paper.venue;
    j["year"] = paper.year;
    j["importance"] = importance_json(paper.importance);
    out << j.dump() << "\n";
  }
  std::vector<const ConceptNode*> concepts;
  for (const ConceptNode& cnode : corpus.concepts) concepts.push_back(&cnode);
  std::sort(concepts.begin(), concepts.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  for (const ConceptNode* cnode : concepts) {
    ordered_json j;
    j["type"] = "concept";
    j["id"] = cnode->id;
    j["statement"] = cnode->statement;
    j["survey"] = cnode->survey_id;
    j["paragraph"] = cnode->paragraph_index;
    j["papers"] = cnode->linked_paper_ids;
    out << j.dump() << "\n";
  }
  std::vector<const SentenceCitationPair*> pairs;
  for (const SentenceCitationPair& pair : corpus.pairs) pairs.push_back(&pair);
  std::sort(pairs.begin(), pairs.end(), [](const auto* a, const auto* b) {
    return std::tie(a->survey_id, a->paragraph_index, a->sentence_index) <
           std::tie(b->survey_id, b->paragraph_index, b->sentence_index);
  });
  for (const SentenceCitationPair* pair : pairs) {
    ordered_json j;
    j["type"] = "pair";
    j["survey"] = pair->survey_id;
    j["paragraph"] = pair->paragraph_index;
    j["sentence"] = pair->sentence_index;
    j["text"] = pair->sentence_text;
    j["papers"] = pair->cited_paper_ids;
    out << j.dump() << "\n";
  }
  return out.str();
}

Corpus corpus_from_jsonl(const std::string& text) {
  Corpus corpus;
  std::istringstream lines(text);
  std::string line;
  int line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    std::string path = "line[" + std::to_string(line_number) + "]";
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw SchemaViolationError(path, "not a JSON object");
    }
    std::string type = as_string(require(j, "type", path), path + ".type");
    if (type == "survey_meta") {
      SurveyDoc survey;
      survey.id = as_string(require(j, "id", path), path + ".id");
      survey.title = as_string(require(j, "title", path), path + ".title");
      survey.paragraphs =
          as_string_list(require(j, "paragraphs", path), path + ".paragraphs");
      const ordered_json& sentences = require(j, "sentences", path);
      if (!sentences.is_array()) {
        throw SchemaViolationError(path + ".sentences", "expected array");
      }
      for (std::size_t p = 0; p < sentences.size(); ++p) {
        survey.sentences.push_back(as_string_list(
            sentences[p], path + ".sentences[" + std::to_string(p) + "]"));
      }
      survey.references =
          as_string_list(require(j, "references", path), path + ".references");
      corpus.surveys.push_back(std::move(survey));
    } else if (type == "paper") {
      PaperNode paper;
      paper.id = as_string(require(j, "id", path), path + ".id");
      paper.title = as_string(require(j, "title", path), path + ".title");
      paper.abstract =
          as_string(require(j, "abstract", path), path + ".abstract");
      paper.authors =
          as_string_list(require(j, "authors", path), path + ".authors");
      paper.venue = as_string(require(j, "venue", path), path + ".venue");
      paper.year = as_int(require(j, "year", path), path + ".year");
      const ordered_json& importance = require(j, "importance", path);
      if (!importance.is_null()) {
        std::string ipath = path + ".importance";
        ImportanceScore score;
        score.graph_score =
            as_number(require(importance, "graph", ipath), ipath + ".graph");
        score.llm_score =
            as_number(require(importance, "llm", ipath), ipath + ".llm");
        score.gamma =
            as_number(require(importance, "gamma", ipath), ipath + ".gamma");
        score.combined = as_number(require(importance, "combined", ipath),
                                   ipath + ".combined");
        paper.importance = score;
      }
      if (corpus.papers.count(paper.id)) {
        throw SchemaViolationError(path + ".id",
                                   "duplicate paper id " + paper.id);
      }
      corpus.papers[paper.id] = std::move(paper);
    } else if (type == "concept") {
      ConceptNode cnode;
      cnode.id = as_string(require(j, "id", path), path + ".id");
      cnode.statement =
          as_string(require(j, "statement", path), path + ".statement");
      cnode.survey_id =
          as_string(require(j, "survey", path), path + ".survey");
      cnode.paragraph_index =
          as_int(require(j, "paragraph", path), path + ".paragraph");
      cnode.linked_paper_ids =
          as_string_list(require(j, "papers", path), path + ".papers");
      corpus.concepts.push_back(std::move(cnode));
    } else if (type == "pair") {
      SentenceCitationPair pair;
      pair.survey_id = as_string(require(j, "survey", path), path + ".survey");
      pair.paragraph_index =
          as_int(require(j, "paragraph", path), path + ".paragraph");
      pair.sentence_index =
          as_int(require(j, "sentence", path), path + ".sentence");
      pair.sentence_text = as_string(require(j, "text", path), path + ".text");
      pair.cited_paper_ids =
          as_string_list(require(j, "papers", path), path + ".papers");
      corpus.pairs.push_back(std::move(pair));
    } else {
      throw SchemaViolationError(path + ".type", "unknown record type " + type);
    }
  }
  std::sort(corpus.surveys.begin(), corpus.surveys.end(),
            [](const SurveyDoc& a, const SurveyDoc& b) { return a.id < b.id; });
  std::sort(corpus.concepts.begin(), corpus.concepts.end(),
            [](const ConceptNode& a, const ConceptNode& b) { return a.id < b.id; });
  std::sort(corpus.pairs.begin(), corpus.pairs.end(),
            [](const SentenceCitationPair& a, const SentenceCitationPair& b) {
              return std::tie(a.survey_id, a.paragraph_index, a.sentence_index) <
                     std::tie(b.survey_id, b.paragraph_index, b.sentence_index);
            });
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UnreadableFileError("cannot open " + path + " for writing");
  out << corpus_to_jsonl(corpus);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFileError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return corpus_from_jsonl(buffer.str());
}

}  // namespace evotree
