#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sess/io.hpp"
#include "sess/rle.hpp"

namespace sess::io {

using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                what + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ParseError, path + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
  return *it;
}

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path,
                bool strict) {
  if (!strict) return;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) schema_error(path, "unknown field '" + it.key() + "'");
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

EmbeddingVector as_embedding(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  EmbeddingVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

json embedding_json(const EmbeddingVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::uint32_t as_dimension(const json& j, const std::string& path) {
  const auto v = as_integer(j, path);
  if (v <= 0 || v > 1'000'000) schema_error(path, "expected a positive pixel count");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

SceneGraph parse_graph(std::string_view text, bool strict) {
  const json doc = parse_json(text, "graph");
  check_object(doc, "graph");
  check_keys(doc, {"schema_version", "image", "nodes", "edges", "metadata"}, "graph", strict);

  const json& version = require(doc, "schema_version", "graph");
  if (as_string(version, "schema_version") != "1")
    schema_error("schema_version", "unsupported version '" + version.get<std::string>() + "'");

  SceneGraph g;
  const json& image = require(doc, "image", "graph");
  check_object(image, "image");
  check_keys(image, {"id", "width", "height", "embedding"}, "image", strict);
  g.image.id = as_string(require(image, "id", "image"), "image.id");
  g.image.width = as_dimension(require(image, "width", "image"), "image.width");
  g.image.height = as_dimension(require(image, "height", "image"), "image.height");
  g.image_embedding = as_embedding(require(image, "embedding", "image"), "image.embedding");

  const json& nodes = require(doc, "nodes", "graph");
  if (!nodes.is_array()) schema_error("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    check_object(n, path);
    check_keys(n, {"id", "label", "bbox", "mask_rle", "embedding", "raw_importance"}, path, strict);
    GraphNode node;
    node.id = as_integer(require(n, "id", path), path + ".id");
    node.label = as_string(require(n, "label", path), path + ".label");
    const json& bbox = require(n, "bbox", path);
    if (!bbox.is_array() || bbox.size() != 4) schema_error(path + ".bbox", "expected [x, y, w, h]");
    node.region.bbox = {as_number(bbox[0], path + ".bbox[0]"), as_number(bbox[1], path + ".bbox[1]"),
                        as_number(bbox[2], path + ".bbox[2]"), as_number(bbox[3], path + ".bbox[3]")};
    if (auto it = n.find("mask_rle"); it != n.end() && !it->is_null()) {
      try {
        node.region.mask = rle_from_string(as_string(*it, path + ".mask_rle"), g.image.height,
                                           g.image.width);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError) throw;
        schema_error(path + ".mask_rle", e.what());
      }
    }
    node.embedding = as_embedding(require(n, "embedding", path), path + ".embedding");
    if (auto it = n.find("raw_importance"); it != n.end() && !it->is_null())
      node.raw_importance = as_number(*it, path + ".raw_importance");
    g.nodes.push_back(std::move(node));
  }

  const json& edges = require(doc, "edges", "graph");
  if (!edges.is_array()) schema_error("edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    check_object(e, path);
    check_keys(e, {"subject", "object", "relation"}, path, strict);
    g.edges.push_back({as_integer(require(e, "subject", path), path + ".subject"),
                       as_integer(require(e, "object", path), path + ".object"),
                       as_string(require(e, "relation", path), path + ".relation")});
  }

  if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
    check_object(*it, "metadata");
    for (auto m = it->begin(); m != it->end(); ++m)
      g.metadata[m.key()] = as_string(m.value(), "metadata." + m.key());
  }

  require_valid(g);
  return g;
}

SceneGraph load_graph(const fs::path& path, bool strict) {
  try {
    return parse_graph(read_file(path), strict);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string dump_graph(const SceneGraph& g) {
  json doc;
  doc["schema_version"] = "1";
  doc["image"] = {{"id", g.image.id},
                  {"width", g.image.width},
                  {"height", g.image.height},
                  {"embedding", embedding_json(g.image_embedding)}};
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    const auto& b = n.region.bbox;
    json node = {{"id", n.id},
                 {"label", n.label},
                 {"bbox", {b.x, b.y, b.w, b.h}},
                 {"embedding", embedding_json(n.embedding)}};
    if (n.region.mask) node["mask_rle"] = rle_to_string(*n.region.mask);
    if (n.raw_importance) node["raw_importance"] = *n.raw_importance;
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"subject", e.subject}, {"object", e.object}, {"relation", e.relation}});
  doc["edges"] = std::move(edges);
  if (!g.metadata.empty()) doc["metadata"] = g.metadata;
  return doc.dump(2) + "\n";
}

void save_graph(const fs::path& path, const SceneGraph& g) { write_file(path, dump_graph(g)); }

RelationSimilarityTable parse_relation_table(std::string_view text) {
  const json doc = parse_json(text, "relation table");
  check_object(doc, "relation table");
  const json& labels = require(doc, "labels", "relation table");
  const json& matrix = require(doc, "matrix", "relation table");
  if (!labels.is_array()) schema_error("labels", "expected an array of strings");
  if (!matrix.is_array() || matrix.size() != labels.size())
    schema_error("matrix", "expected |labels| rows");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < labels.size(); ++i)
    names.push_back(as_string(labels[i], "labels[" + std::to_string(i) + "]"));
  const auto n = static_cast<Eigen::Index>(names.size());
  SimilarityMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = matrix[static_cast<std::size_t>(i)];
    const std::string path = "matrix[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != names.size()) schema_error(path, "expected |labels| entries");
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = as_number(row[static_cast<std::size_t>(j)], path + "[" + std::to_string(j) + "]");
  }
  try {
    return RelationSimilarityTable(std::move(names), std::move(m));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

RelationSimilarityTable load_relation_table(const fs::path& path) {
  try {
    return parse_relation_table(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string dump_relation_table(const RelationSimilarityTable& table) {
  json doc;
  doc["labels"] = table.labels();
  json rows = json::array();
  for (Eigen::Index i = 0; i < table.matrix().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < table.matrix().cols(); ++j) row.push_back(table.matrix()(i, j));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  return doc.dump(2) + "\n";
}

HyperParams parse_params(std::string_view text) {
  json doc = parse_json(text, "params");
  check_object(doc, "params");
  if (auto it = doc.find("params"); it != doc.end()) doc = *it;
  check_object(doc, "params");
  HyperParams p;
  if (auto it = doc.find("alpha"); it != doc.end()) p.alpha = as_number(*it, "alpha");
  if (auto it = doc.find("beta"); it != doc.end()) p.beta = as_number(*it, "beta");
  if (auto it = doc.find("gamma"); it != doc.end()) p.gamma = as_number(*it, "gamma");
  if (auto it = doc.find("iterations"); it != doc.end())
    p.iterations = static_cast<int>(as_integer(*it, "iterations"));
  if (auto it = doc.find("k"); it != doc.end()) p.k = as_number(*it, "k");
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, std::string("params: ") + e.what());
  }
  return p;
}

HyperParams load_params(const fs::path& path) {
  try {
    return parse_params(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string dump_params(const HyperParams& p) {
  const json doc = {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma},
                    {"iterations", p.iterations}, {"k", p.k}};
  return doc.dump(2) + "\n";
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::string_view text, const fs::path& base_dir,
                                          bool strict) {
  std::vector<ManifestEntry> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string where = "manifest line " + std::to_string(line_no);
    try {
      const json j = parse_json(line, where);
      check_object(j, where);
      check_keys(j, {"ref_graph", "cand_graph", "condition", "ref_raster", "cand_raster",
                     "ref_patches", "cand_patches"},
                 where, strict);
      ManifestEntry e;
      e.line = line_no;
      e.ref_graph = resolve(base_dir, as_string(require(j, "ref_graph", where), where + ".ref_graph"));
      e.cand_graph = resolve(base_dir, as_string(require(j, "cand_graph", where), where + ".cand_graph"));
      const json& cond = require(j, "condition", where);
      check_object(cond, where + ".condition");
      check_keys(cond, {"name", "value"}, where + ".condition", strict);
      e.condition_name = as_string(require(cond, "name", where + ".condition"), where + ".condition.name");
      e.condition_value = as_number(require(cond, "value", where + ".condition"), where + ".condition.value");
      auto optional_path = [&](const char* key, std::optional<fs::path>& dst) {
        if (auto it = j.find(key); it != j.end() && !it->is_null())
          dst = resolve(base_dir, as_string(*it, where + "." + key));
      };
      optional_path("ref_raster", e.ref_raster);
      optional_path("cand_raster", e.cand_raster);
      optional_path("ref_patches", e.ref_patches);
      optional_path("cand_patches", e.cand_patches);
      out.push_back(std::move(e));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError) throw;
      const std::string msg = e.what();
      throw Error(ErrorCode::ParseError,
                  msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
  });
  return out;
}

std::vector<ManifestEntry> load_manifest(const fs::path& path, bool strict) {
  return parse_manifest(read_file(path), path.parent_path(), strict);
}

std::vector<AnnotationRecord> parse_annotations(std::string_view text) {
  std::vector<AnnotationRecord> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string where = "dataset line " + std::to_string(line_no);
    const json j = parse_json(line, where);
    check_object(j, where);
    AnnotationRecord rec;
    rec.original = as_string(require(j, "original", where), where + ".original");
    const json& cands = require(j, "candidates", where);
    if (!cands.is_array() || cands.empty()) schema_error(where + ".candidates", "expected a nonempty array");
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const std::string path = where + ".candidates[" + std::to_string(i) + "]";
      check_object(cands[i], path);
      AnnotationCandidate c;
      c.graph = as_string(require(cands[i], "graph", path), path + ".graph");
      c.human_score = as_number(require(cands[i], "human_score", path), path + ".human_score");
      if (c.human_score < 0 || c.human_score > 1) schema_error(path + ".human_score", "must lie in [0,1]");
      rec.candidates.push_back(std::move(c));
    }
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<AnnotationRecord> load_annotations(const fs::path& path) {
  try {
    return parse_annotations(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

AnnotatedDataset resolve_annotations(const std::vector<AnnotationRecord>& records,
                                     const fs::path& base_dir, bool strict) {
  AnnotatedDataset ds;
  std::map<fs::path, std::size_t> loaded;
  auto graph = [&](const std::string& ref) {
    const fs::path p = resolve(base_dir, ref);
    if (auto it = loaded.find(p); it != loaded.end()) return it->second;
    if (!fs::is_regular_file(p))
      throw Error(ErrorCode::MissingGraphFile, "graph file not found: " + p.string());
    const std::size_t idx = ds.add_graph(load_graph(p, strict));
    loaded.emplace(p, idx);
    return idx;
  };
  for (const auto& rec : records) {
    const std::size_t orig = graph(rec.original);
    for (const auto& c : rec.candidates) ds.add_pair(orig, graph(c.graph), c.human_score);
  }
  return ds;
}

std::string report_to_json(const ScoreReport& report) {
  json doc;
  doc["sess"] = report.sess;
  doc["image_score"] = report.image_score;
  doc["graph_score"] = report.graph_score;
  json matching = json::array();
  for (const auto& m : report.matching)
    matching.push_back({{"node1", m.node1},
                        {"node2", m.node2},
                        {"weight", m.weight},
                        {"similarity", m.similarity}});
  doc["matching"] = std::move(matching);
  if (!report.baselines.empty()) {
    json b = json::object();
    for (const auto& [name, v] : report.baselines) {
      if (std::isfinite(v)) b[name] = v;
      else b[name] = v > 0 ? "inf" : "-inf";
    }
    doc["baselines"] = std::move(b);
  }
  return doc.dump(2) + "\n";
}

}  // namespace sess::io
