#include <chrono>
#include <stdexcept>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "evotree/errors.hpp"
#include "evotree/oracle.hpp"

namespace evotree {
namespace {

using nlohmann::json;

// "http://host:1234/path" -> ("http://host:1234", "/path")
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("oracle endpoint must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json parse_body(const std::string& body) {
  json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw MalformedResponseError("oracle response is not a JSON object");
  }
  return parsed;
}

double score_field(const json& body, const char* field = "score") {
  if (!body.contains(field) || !body[field].is_number()) {
    throw MalformedResponseError(std::string("oracle response missing numeric '") +
                                 field + "'");
  }
  return body[field].get<double>();
}

std::string string_field(const json& body, const char* field) {
  if (!body.contains(field) || !body[field].is_string()) {
    throw MalformedResponseError(std::string("oracle response missing string '") +
                                 field + "'");
  }
  return body[field].get<std::string>();
}

std::vector<std::string> string_list_field(const json& body, const char* field) {
  if (!body.contains(field) || !body[field].is_array()) {
    throw MalformedResponseError(std::string("oracle response missing array '") +
                                 field + "'");
  }
  std::vector<std::string> out;
  for (const json& item : body[field]) {
    if (!item.is_string()) {
      throw MalformedResponseError(std::string("non-string entry in '") + field +
                                   "'");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

json path_json(const std::vector<PaperNode>& path) {
  json out = json::array();
  for (const PaperNode& node : path) {
    out.push_back({{"id", node.id},
                   {"statement", node_statement(node)},
                   {"year", node.year}});
  }
  return out;
}

}  // namespace

struct RemoteOracle::Impl {
  explicit Impl(const OracleConfig& config) {
    auto [base, request_path] = split_endpoint(config.endpoint);
    path = request_path;
    client = std::make_unique<httplib::Client>(base);
    auto timeout = std::chrono::milliseconds(config.timeout_ms);
    client->set_connection_timeout(timeout);
    client->set_read_timeout(timeout);
    client->set_write_timeout(timeout);
  }

  std::unique_ptr<httplib::Client> client;
  std::string path;
};

RemoteOracle::RemoteOracle(OracleConfig config)
    : impl_(std::make_unique<Impl>(config)) {}

RemoteOracle::~RemoteOracle() = default;

std::string RemoteOracle::post(const std::string& op,
                               const std::string& inputs_json) {
  json request = {{"op", op}, {"inputs", json::parse(inputs_json)}};
  httplib::Result result =
      impl_->client->Post(impl_->path, request.dump(), "application/json");
  if (!result) {
    throw OracleUnavailableError("oracle request '" + op + "' failed: " +
                                 httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw OracleUnavailableError("oracle request '" + op +
                                 "' returned HTTP " +
                                 std::to_string(result->status));
  }
  return result->body;
}

double RemoteOracle::do_priority(const std::string& node_summary,
                                 const std::string& topic) {
  json inputs = {{"node_summary", node_summary}, {"topic", topic}};
  return score_field(parse_body(post("priority", inputs.dump())));
}

double RemoteOracle::do_importance(const PaperNode& paper,
                                   const std::string& topic) {
  json inputs = {{"paper", {{"id", paper.id},
                            {"statement", node_statement(paper)},
                            {"year", paper.year}}},
                 {"topic", topic}};
  return score_field(parse_body(post("importance", inputs.dump())));
}

double RemoteOracle::do_continuation(const std::vector<PaperNode>& path,
                                     const PaperNode& candidate) {
  json inputs = {{"path", path_json(path)},
                 {"candidate", {{"id", candidate.id},
                                {"statement", node_statement(candidate)},
                                {"year", candidate.year}}}};
  return score_field(parse_body(post("continuation", inputs.dump())));
}

double RemoteOracle::do_similarity(const std::string& text_a,
                                   const std::string& text_b) {
  json inputs = {{"text_a", text_a}, {"text_b", text_b}};
  return score_field(parse_body(post("similarity", inputs.dump())));
}

NliVerdict RemoteOracle::do_nli(const std::string& premise,
                                const std::string& hypothesis) {
  json inputs = {{"premise", premise}, {"hypothesis", hypothesis}};
  json body = parse_body(post("nli", inputs.dump()));
  NliVerdict verdict;
  try {
    verdict.label = nli_label_from_string(string_field(body, "label"));
  } catch (const MalformedResponseError&) {
    throw;
  } catch (const Error& e) {
    throw MalformedResponseError(e.what());
  }
  verdict.probability = score_field(body, "probability");
  return verdict;
}

LlmVerification RemoteOracle::do_verify(const std::string& claim,
                                        const std::string& evidence,
                                        const std::string& context) {
  json inputs = {{"claim", claim}, {"evidence", evidence}, {"context", context}};
  json body = parse_body(post("verify", inputs.dump()));
  LlmVerification out;
  out.score = score_field(body);
  out.kind = verification_kind_from_string(string_field(body, "kind"));
  return out;
}

std::vector<std::string> RemoteOracle::do_propose(const std::string& context,
                                                  const std::string& topic,
                                                  int k) {
  json inputs = {{"context", context}, {"topic", topic}, {"k", k}};
  return string_list_field(parse_body(post("propose", inputs.dump())),
                           "statements");
}

std::string RemoteOracle::do_summarize(const std::string& text) {
  json inputs = {{"text", text}};
  return string_field(parse_body(post("summarize", inputs.dump())), "summary");
}

std::vector<std::string> RemoteOracle::do_concepts(const std::string& paragraph) {
  json inputs = {{"paragraph", paragraph}};
  return string_list_field(parse_body(post("concepts", inputs.dump())),
                           "concepts");
}

}  // namespace evotree
