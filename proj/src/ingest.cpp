#include "evotree/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "evotree/errors.hpp"

namespace evotree {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

/// Straight quotes for smart ones so one title regex covers both.
std::string normalize_quotes(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, 3, "\xE2\x80\x9C") == 0 ||
        s.compare(i, 3, "\xE2\x80\x9D") == 0) {
      out += '"';
      i += 3;
    } else if (s.compare(i, 3, "\xE2\x80\x99") == 0) {
      out += '\'';
      i += 3;
    } else {
      out += s[i];
      ++i;
    }
  }
  return out;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && (s.back() == ',' || s.back() == '.' || s.back() == ';' ||
                        s.back() == ' ')) {
    s.pop_back();
  }
  return s;
}

/// Last plausible publication year in the entry (IEEE puts it at the end).
std::optional<int> last_year(const std::string& text) {
  static const std::regex year_re("(19|20)[0-9]{2}");
  std::optional<int> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), year_re);
       it != std::sregex_iterator(); ++it) {
    found = std::stoi(it->str());
  }
  return found;
}

std::vector<std::string> split_authors_ieee(const std::string& blob) {
  // "A. Vaswani, N. Shazeer, and I. Polosukhin" -> three entries.
  std::string cleaned = std::regex_replace(blob, std::regex("\\band\\b|&"), ",");
  std::vector<std::string> out;
  std::stringstream stream(cleaned);
  std::string part;
  while (std::getline(stream, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<std::string> split_authors_apa(const std::string& blob) {
  // "Vaswani, A., Shazeer, N., & Polosukhin, I." — comma-separated segments
  // alternate surname / initials, so stitch them back together pairwise.
  std::string cleaned = std::regex_replace(blob, std::regex("&"), "");
  std::vector<std::string> segments;
  std::stringstream stream(cleaned);
  std::string part;
  while (std::getline(stream, part, ',')) {
    part = trim(part);
    if (!part.empty()) segments.push_back(part);
  }
  static const std::regex initials_re("^([A-Z]\\.\\s*)+$");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i + 1 < segments.size() &&
        std::regex_match(segments[i + 1], initials_re)) {
      out.push_back(segments[i] + ", " + segments[i + 1]);
      ++i;
    } else {
      out.push_back(segments[i]);
    }
  }
  return out;
}

bool parse_ieee(const std::string& raw, PaperNode& out, std::string& diagnostic) {
  std::string text = normalize_quotes(raw);
  // Leading "[n]" marker is part of the style, not of the data.
  static const std::regex marker_re("^\\s*\\[[0-9]+\\]\\s*");
  text = std::regex_replace(text, marker_re, "");

  std::size_t open = text.find('"');
  std::size_t close = open == std::string::npos ? std::string::npos
                                                : text.find('"', open + 1);
  if (open == std::string::npos || close == std::string::npos) {
    diagnostic = "no quoted title";
    return false;
  }
  std::string title = strip_trailing_punct(trim(text.substr(open + 1, close - open - 1)));
  if (title.empty()) {
    diagnostic = "empty title";
    return false;
  }
  std::optional<int> year = last_year(text.substr(close + 1));
  if (!year) {
    diagnostic = "no publication year";
    return false;
  }
  out.title = title;
  out.year = *year;
  out.authors = split_authors_ieee(strip_trailing_punct(trim(text.substr(0, open))));
  std::string tail = trim(text.substr(close + 1));
  static const std::regex venue_re("^[,.]?\\s*(?:in\\s+)?(.*?)[,.]?\\s*(?:pp\\..*)?(19|20)[0-9]{2}.*$");
  std::smatch m;
  if (std::regex_match(tail, m, venue_re)) {
    out.venue = strip_trailing_punct(trim(m[1].str()));
  }
  return true;
}

bool parse_apa(const std::string& raw, PaperNode& out, std::string& diagnostic) {
  std::string text = normalize_quotes(raw);
  static const std::regex year_re("\\((\\d{4})[a-z]?(?:,\\s*[A-Za-z]+)?\\)");
  std::smatch m;
  if (!std::regex_search(text, m, year_re)) {
    diagnostic = "no parenthesized year";
    return false;
  }
  int year = std::stoi(m[1].str());
  std::size_t after = static_cast<std::size_t>(m.position(0) + m.length(0));
  // Skip the ". " that follows "(2017)".
  while (after < text.size() && (text[after] == '.' || text[after] == ' ')) {
    ++after;
  }
  std::size_t title_end = text.find('.', after);
  std::string title =
      title_end == std::string::npos
          ? strip_trailing_punct(trim(text.substr(after)))
          : strip_trailing_punct(trim(text.substr(after, title_end - after)));
  if (title.empty()) {
    diagnostic = "empty title";
    return false;
  }
  out.title = title;
  out.year = year;
  // The period before the year parenthetical belongs to the last initial
  // ("Vaswani, A."), so the author blob keeps its trailing punctuation.
  out.authors = split_authors_apa(
      trim(text.substr(0, static_cast<std::size_t>(m.position(0)))));
  if (title_end != std::string::npos) {
    out.venue = strip_trailing_punct(trim(text.substr(title_end + 1)));
  }
  return true;
}

RefStyle detect_style(const std::string& raw) {
  static const std::regex ieee_marker("^\\s*\\[[0-9]+\\]");
  if (std::regex_search(raw, ieee_marker)) return RefStyle::ieee;
  static const std::regex apa_year("\\(\\d{4}[a-z]?(?:,\\s*[A-Za-z]+)?\\)\\.");
  if (std::regex_search(raw, apa_year)) return RefStyle::apa;
  return RefStyle::ieee;
}

std::string normalize_title(const std::string& title) {
  std::string out;
  for (unsigned char c : title) {
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != ' ') {
      out += ' ';
    }
  }
  return trim(out);
}

}  // namespace

std::string paper_id_for(const std::string& title, int year) {
  std::string slug = normalize_title(title);
  std::replace(slug.begin(), slug.end(), ' ', '-');
  return slug + "-" + std::to_string(year);
}

std::vector<PaperNode> ParsedReferences::papers() const {
  std::vector<PaperNode> out;
  for (const ReferenceEntry& entry : entries) {
    if (entry.paper) out.push_back(*entry.paper);
  }
  return out;
}

std::vector<std::string> ParsedReferences::diagnostics() const {
  std::vector<std::string> out;
  for (const ReferenceEntry& entry : entries) {
    if (!entry.diagnostic.empty()) {
      out.push_back("entry " + std::to_string(entry.index + 1) + ": " +
                    entry.diagnostic);
    }
  }
  return out;
}

ParsedReferences parse_references(const std::string& reference_block,
                                  RefStyle style) {
  if (trim(reference_block).empty()) {
    throw std::invalid_argument("parse_references: empty reference block");
  }
  ParsedReferences out;
  std::stringstream stream(reference_block);
  std::string line;
  while (std::getline(stream, line)) {
    line = trim(line);
    if (line.empty()) continue;
    ReferenceEntry entry;
    entry.index = static_cast<int>(out.entries.size());
    entry.raw = line;

    RefStyle effective = style == RefStyle::auto_detect ? detect_style(line) : style;
    PaperNode paper;
    std::string diagnostic;
    bool ok = effective == RefStyle::ieee ? parse_ieee(line, paper, diagnostic)
                                          : parse_apa(line, paper, diagnostic);
    if (ok) {
      paper.id = paper_id_for(paper.title, paper.year);
      entry.paper = std::move(paper);
    } else {
      entry.diagnostic = diagnostic;
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

namespace {

struct MarkerMatch {
  std::size_t begin = 0;
  std::size_t length = 0;
  std::vector<int> numeric;      // 1-based reference numbers
  std::string surname;           // author-year form
  int year = 0;
};

std::vector<MarkerMatch> find_markers(const std::string& sentence) {
  std::vector<MarkerMatch> out;
  static const std::regex numeric_re(
      "\\[\\s*\\d+(?:\\s*(?:-|\xE2\x80\x93)\\s*\\d+)?"
      "(?:\\s*,\\s*\\d+(?:\\s*(?:-|\xE2\x80\x93)\\s*\\d+)?)*\\s*\\]");
  for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), numeric_re);
       it != std::sregex_iterator(); ++it) {
    MarkerMatch match;
    match.begin = static_cast<std::size_t>(it->position(0));
    match.length = static_cast<std::size_t>(it->length(0));
    std::string inner = it->str();
    static const std::regex item_re("(\\d+)(?:\\s*(?:-|\xE2\x80\x93)\\s*(\\d+))?");
    for (auto item = std::sregex_iterator(inner.begin(), inner.end(), item_re);
         item != std::sregex_iterator(); ++item) {
      int low = std::stoi((*item)[1].str());
      int high = (*item)[2].matched ? std::stoi((*item)[2].str()) : low;
      for (int n = low; n <= high && n - low < 50; ++n) match.numeric.push_back(n);
    }
    out.push_back(std::move(match));
  }
  static const std::regex author_re(
      "\\(([A-Z][A-Za-z'-]+)(?:\\s+et\\s+al\\.)?,\\s*(\\d{4})\\)");
  for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), author_re);
       it != std::sregex_iterator(); ++it) {
    MarkerMatch match;
    match.begin = static_cast<std::size_t>(it->position(0));
    match.length = static_cast<std::size_t>(it->length(0));
    match.surname = (*it)[1].str();
    match.year = std::stoi((*it)[2].str());
    out.push_back(std::move(match));
  }
  std::sort(out.begin(), out.end(),
            [](const MarkerMatch& a, const MarkerMatch& b) {
              return a.begin < b.begin;
            });
  return out;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Case-insensitive whole-word containment of the surname in the author list.
bool authors_contain(const std::vector<std::string>& authors,
                     const std::string& surname) {
  std::string needle = lowercase(surname);
  for (const std::string& author : authors) {
    std::string hay = lowercase(author);
    std::size_t pos = hay.find(needle);
    while (pos != std::string::npos) {
      bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(hay[pos - 1]));
      std::size_t end = pos + needle.size();
      bool right_ok = end == hay.size() ||
                      !std::isalpha(static_cast<unsigned char>(hay[end]));
      if (left_ok && right_ok) return true;
      pos = hay.find(needle, pos + 1);
    }
  }
  return false;
}

std::string strip_markers(const std::string& sentence,
                          const std::vector<MarkerMatch>& markers) {
  std::string out;
  std::size_t cursor = 0;
  for (const MarkerMatch& marker : markers) {
    std::size_t begin = marker.begin;
    // Eat the whitespace that preceded the marker.
    while (begin > cursor && std::isspace(static_cast<unsigned char>(sentence[begin - 1]))) {
      --begin;
    }
    out += sentence.substr(cursor, begin - cursor);
    cursor = marker.begin + marker.length;
  }
  out += sentence.substr(cursor);
  std::string collapsed;
  for (char c : out) {
    if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
    collapsed += c;
  }
  return trim(collapsed);
}

int count_tokens(const std::string& text) {
  std::stringstream stream(text);
  std::string token;
  int count = 0;
  while (stream >> token) ++count;
  return count;
}

bool only_punctuation(const std::string& text) {
  for (unsigned char c : text) {
    if (std::isalnum(c)) return false;
  }
  return true;
}

}  // namespace

PairingResult pair_sentences_citations(const SurveyDoc& survey,
                                       const ParsedReferences& refs,
                                       const PairingOptions& options) {
  if (options.min_tokens < 1) {
    throw std::invalid_argument("pair_sentences_citations: min_tokens must be >= 1");
  }
  PairingResult result;
  for (std::size_t p = 0; p < survey.sentences.size(); ++p) {
    for (std::size_t s = 0; s < survey.sentences[p].size(); ++s) {
      const std::string& sentence = survey.sentences[p][s];
      std::vector<MarkerMatch> markers = find_markers(sentence);
      if (markers.empty()) continue;

      std::string where = survey.id + " paragraph " + std::to_string(p) +
                          " sentence " + std::to_string(s);
      std::vector<std::string> cited;
      std::set<std::string> seen;
      auto add = [&](const std::string& id) {
        if (seen.insert(id).second) cited.push_back(id);
      };
      for (const MarkerMatch& marker : markers) {
        if (!marker.surname.empty()) {
          bool resolved = false;
          for (const ReferenceEntry& entry : refs.entries) {
            if (entry.paper && entry.paper->year == marker.year &&
                authors_contain(entry.paper->authors, marker.surname)) {
              add(entry.paper->id);
              resolved = true;
              break;
            }
          }
          if (!resolved) {
            result.diagnostics.push_back(where + ": unresolved citation (" +
                                         marker.surname + ", " +
                                         std::to_string(marker.year) + ")");
          }
          continue;
        }
        for (int n : marker.numeric) {
          if (n < 1 || n > static_cast<int>(refs.entries.size()) ||
              !refs.entries[static_cast<std::size_t>(n - 1)].paper) {
            result.diagnostics.push_back(where + ": unresolved citation [" +
                                         std::to_string(n) + "]");
            continue;
          }
          add(refs.entries[static_cast<std::size_t>(n - 1)].paper->id);
        }
      }
      if (cited.empty()) continue;  // diagnostics already recorded

      std::string stripped = strip_markers(sentence, markers);
      if (options.drop_pure_citations && only_punctuation(stripped)) {
        result.diagnostics.push_back(where + ": pure citation list dropped");
        continue;
      }
      if (count_tokens(stripped) < options.min_tokens) {
        result.diagnostics.push_back(where + ": sentence below " +
                                     std::to_string(options.min_tokens) +
                                     " tokens dropped");
        continue;
      }
      SentenceCitationPair pair;
      pair.survey_id = survey.id;
      pair.paragraph_index = static_cast<int>(p);
      pair.sentence_index = static_cast<int>(s);
      pair.sentence_text = stripped;
      pair.cited_paper_ids = std::move(cited);
      result.pairs.push_back(std::move(pair));
    }
  }
  return result;
}

std::vector<ConceptNode> extract_concepts(
    const SurveyDoc& survey, const std::vector<SentenceCitationPair>& pairs,
    Oracle& oracle) {
  std::vector<ConceptNode> out;
  int counter = 0;
  for (std::size_t p = 0; p < survey.paragraphs.size(); ++p) {
    std::set<std::string> linked;
    for (const SentenceCitationPair& pair : pairs) {
      if (pair.survey_id == survey.id &&
          pair.paragraph_index == static_cast<int>(p)) {
        linked.insert(pair.cited_paper_ids.begin(), pair.cited_paper_ids.end());
      }
    }
    for (const std::string& statement :
         oracle.extract_concepts(survey.paragraphs[p])) {
      if (trim(statement).empty()) continue;
      ConceptNode node;
      node.id = survey.id + "-c" + std::to_string(counter++);
      node.statement = statement;
      node.survey_id = survey.id;
      node.paragraph_index = static_cast<int>(p);
      node.linked_paper_ids.assign(linked.begin(), linked.end());
      out.push_back(std::move(node));
    }
  }
  return out;
}

SurveyDoc survey_from_text(const std::string& id, const std::string& text) {
  SurveyDoc survey;
  survey.id = id;

  static const std::regex references_heading(
      "^\\s*#*\\s*references\\s*:?\\s*$", std::regex::icase);
  std::vector<std::string> body_lines;
  std::vector<std::string> reference_lines;
  bool in_references = false;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!in_references && std::regex_match(line, references_heading)) {
      in_references = true;
      continue;
    }
    (in_references ? reference_lines : body_lines).push_back(line);
  }

  std::size_t first = 0;
  while (first < body_lines.size() && trim(body_lines[first]).empty()) ++first;
  if (first < body_lines.size()) {
    std::string title = trim(body_lines[first]);
    while (!title.empty() && title.front() == '#') title.erase(title.begin());
    survey.title = trim(title);
    ++first;
  }

  std::string body;
  for (std::size_t i = first; i < body_lines.size(); ++i) {
    body += body_lines[i];
    body += '\n';
  }
  survey.paragraphs = split_paragraphs(body);
  for (const std::string& paragraph : survey.paragraphs) {
    survey.sentences.push_back(split_sentences(paragraph));
  }
  for (const std::string& ref : reference_lines) {
    std::string entry = trim(ref);
    if (!entry.empty()) survey.references.push_back(entry);
  }
  return survey;
}

Corpus build_corpus(const std::vector<std::string>& survey_files,
                    Oracle& oracle, std::vector<std::string>* diagnostics) {
  std::vector<SurveyDoc> surveys;
  for (const std::string& path : survey_files) {
    std::ifstream in(path);
    if (!in) throw UnreadableFileError("cannot open survey file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    surveys.push_back(
        survey_from_text(std::filesystem::path(path).stem().string(),
                         buffer.str()));
  }
  std::sort(surveys.begin(), surveys.end(),
            [](const SurveyDoc& a, const SurveyDoc& b) { return a.id < b.id; });

  Corpus corpus;
  for (SurveyDoc& survey : surveys) {
    std::string block;
    for (const std::string& ref : survey.references) {
      block += ref;
      block += '\n';
    }
    ParsedReferences refs;
    if (!trim(block).empty()) refs = parse_references(block);
    if (diagnostics) {
      for (const std::string& d : refs.diagnostics()) {
        diagnostics->push_back(survey.id + ": " + d);
      }
    }
    for (const PaperNode& paper : refs.papers()) {
      corpus.papers.emplace(paper.id, paper);  // first survey's fields win
    }
    PairingResult pairing = pair_sentences_citations(survey, refs);
    if (diagnostics) {
      diagnostics->insert(diagnostics->end(), pairing.diagnostics.begin(),
                          pairing.diagnostics.end());
    }
    std::vector<ConceptNode> concepts =
        extract_concepts(survey, pairing.pairs, oracle);
    corpus.pairs.insert(corpus.pairs.end(), pairing.pairs.begin(),
                        pairing.pairs.end());
    corpus.concepts.insert(corpus.concepts.end(), concepts.begin(),
                           concepts.end());
    corpus.surveys.push_back(std::move(survey));
  }
  return corpus;
}

}  // namespace evotree
