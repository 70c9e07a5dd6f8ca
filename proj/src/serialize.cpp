#include "evotree/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evotree/errors.hpp"

namespace evotree {

using json = nlohmann::ordered_json;

namespace {

std::string type_name(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "unknown";
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) {
    throw SchemaViolationError(path, "expected object, got " + type_name(obj));
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaViolationError(path + "." + key, "required field missing");
  }
  return *it;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) {
    throw SchemaViolationError(path, "expected string, got " + type_name(j));
  }
  return j.get<std::string>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw SchemaViolationError(path, "expected integer, got " + type_name(j));
  }
  return j.get<int>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw SchemaViolationError(path, "expected number, got " + type_name(j));
  }
  return j.get<double>();
}

json importance_to_json(const std::optional<ImportanceScore>& imp) {
  if (!imp) return nullptr;
  json j;
  j["graph"] = imp->graph_score;
  j["llm"] = imp->llm_score;
  j["gamma"] = imp->gamma;
  j["combined"] = imp->combined;
  return j;
}

json node_to_json(const PaperNode& n) {
  json j;
  j["id"] = n.id;
  j["title"] = n.title;
  j["abstract"] = n.abstract;
  j["authors"] = n.authors;
  j["venue"] = n.venue;
  j["year"] = n.year;
  j["importance"] = importance_to_json(n.importance);
  return j;
}

json edge_to_json(const EvolutionEdge& e) {
  json j;
  j["source"] = e.source_id;
  j["target"] = e.target_id;
  j["kind"] = to_string(e.kind);
  j["nli"] = e.nli_verdict ? json(to_string(*e.nli_verdict)) : json(nullptr);
  j["attribution"] = e.attribution_score ? json(*e.attribution_score) : json(nullptr);
  json ev = json::array();
  for (const Evidence& item : e.evidence) {
    ev.push_back({{"doc", item.doc_id}, {"passage", item.passage}, {"index", item.passage_index}});
  }
  j["evidence"] = std::move(ev);
  return j;
}

PaperNode node_from_json(const json& j, const std::string& path) {
  PaperNode n;
  n.id = as_string(require(j, "id", path), path + ".id");
  n.title = as_string(require(j, "title", path), path + ".title");
  n.abstract = as_string(require(j, "abstract", path), path + ".abstract");
  const json& authors = require(j, "authors", path);
  if (!authors.is_array()) {
    throw SchemaViolationError(path + ".authors", "expected array, got " + type_name(authors));
  }
  for (std::size_t i = 0; i < authors.size(); ++i) {
    n.authors.push_back(as_string(authors[i], path + ".authors[" + std::to_string(i) + "]"));
  }
  n.venue = as_string(require(j, "venue", path), path + ".venue");
  n.year = as_int(require(j, "year", path), path + ".year");
  const json& imp = require(j, "importance", path);
  if (!imp.is_null()) {
    const std::string ipath = path + ".importance";
    ImportanceScore s;
    s.graph_score = as_number(require(imp, "graph", ipath), ipath + ".graph");
    s.llm_score = as_number(require(imp, "llm", ipath), ipath + ".llm");
    s.gamma = as_number(require(imp, "gamma", ipath), ipath + ".gamma");
    s.combined = as_number(require(imp, "combined", ipath), ipath + ".combined");
    n.importance = s;
  }
  return n;
}

EvolutionEdge edge_from_json(const json& j, const std::string& path) {
  EvolutionEdge e;
  e.source_id = as_string(require(j, "source", path), path + ".source");
  e.target_id = as_string(require(j, "target", path), path + ".target");
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  try {
    e.kind = relation_kind_from_string(kind);
  } catch (const Error&) {
    throw SchemaViolationError(path + ".kind", "unknown relation kind '" + kind + "'");
  }
  const json& nli = require(j, "nli", path);
  if (!nli.is_null()) {
    const std::string label = as_string(nli, path + ".nli");
    try {
      e.nli_verdict = nli_label_from_string(label);
    } catch (const Error&) {
      throw SchemaViolationError(path + ".nli", "unknown NLI label '" + label + "'");
    }
  }
  const json& attr = require(j, "attribution", path);
  if (!attr.is_null()) {
    e.attribution_score = as_number(attr, path + ".attribution");
  }
  const json& ev = require(j, "evidence", path);
  if (!ev.is_array()) {
    throw SchemaViolationError(path + ".evidence", "expected array, got " + type_name(ev));
  }
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const std::string epath = path + ".evidence[" + std::to_string(i) + "]";
    Evidence item;
    item.doc_id = as_string(require(ev[i], "doc", epath), epath + ".doc");
    item.passage = as_string(require(ev[i], "passage", epath), epath + ".passage");
    item.passage_index = as_int(require(ev[i], "index", epath), epath + ".index");
    e.evidence.push_back(std::move(item));
  }
  return e;
}

}  // namespace

std::string serialize(const TheTree& tree, int indent) {
  json doc;
  doc["topic"] = tree.topic();
  json nodes = json::array();
  for (const auto& [id, n] : tree.nodes()) {
    nodes.push_back(node_to_json(n));  // map iteration is already id-sorted
  }
  doc["nodes"] = std::move(nodes);

  std::vector<const EvolutionEdge*> order;
  order.reserve(tree.edges().size());
  for (const EvolutionEdge& e : tree.edges()) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const EvolutionEdge* a, const EvolutionEdge* b) {
    return std::tie(a->source_id, a->target_id, a->kind) <
           std::tie(b->source_id, b->target_id, b->kind);
  });
  json edges = json::array();
  for (const EvolutionEdge* e : order) edges.push_back(edge_to_json(*e));
  doc["edges"] = std::move(edges);

  return doc.dump(indent) + "\n";
}

TheTree deserialize(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaViolationError("$", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaViolationError("$", "top level must be an object");
  }

  TheTree tree(as_string(require(doc, "topic", "$"), "$.topic"));

  const json& nodes = require(doc, "nodes", "$");
  if (!nodes.is_array()) {
    throw SchemaViolationError("$.nodes", "expected array, got " + type_name(nodes));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    tree.add_node_unchecked(node_from_json(nodes[i], "nodes[" + std::to_string(i) + "]"));
  }

  const json& edges = require(doc, "edges", "$");
  if (!edges.is_array()) {
    throw SchemaViolationError("$.edges", "expected array, got " + type_name(edges));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    tree.add_edge_unchecked(edge_from_json(edges[i], "edges[" + std::to_string(i) + "]"));
  }

  return tree;
}

void save_tree(const TheTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UnreadableFileError("cannot open '" + path + "' for writing");
  out << serialize(tree);
}

TheTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFileError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::string to_dot(const TheTree& tree) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out;
  };
  std::ostringstream out;
  out << "digraph evotree {\n  rankdir=TB;\n  node [shape=box];\n";
  for (const auto& [id, n] : tree.nodes()) {
    out << "  \"" << escape(id) << "\" [label=\"" << escape(n.title) << "\\n("
        << n.year << ")\"];\n";
  }
  for (const EvolutionEdge& e : tree.edges()) {
    out << "  \"" << escape(e.source_id) << "\" -> \"" << escape(e.target_id) << "\"";
    if (e.kind == RelationKind::cites_plain) {
      out << " [style=dashed]";
    } else if (e.kind == RelationKind::enables) {
      out << " [label=\"enables\"]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace evotree
