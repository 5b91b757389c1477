#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "sess/io.hpp"

namespace sess::io {

namespace {

constexpr char kEmbeddingMagic[4] = {'S', 'E', 'M', 'B'};

std::uint32_t read_u32_le(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

void write_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<EmbeddingVector> decode_embeddings(std::string_view bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0)
    throw Error(ErrorCode::UnsupportedFormat, "embedding file: bad magic");
  const std::uint32_t dim = read_u32_le(bytes.data() + 4);
  const std::uint32_t count = read_u32_le(bytes.data() + 8);
  if (dim == 0) throw Error(ErrorCode::CorruptFile, "embedding file: zero dimension");
  const std::uint64_t need = 12 + std::uint64_t{dim} * count * 4;
  if (bytes.size() != need)
    throw Error(ErrorCode::CorruptFile, "embedding file: expected " + std::to_string(need) +
                                            " bytes, found " + std::to_string(bytes.size()));
  std::vector<EmbeddingVector> out(count, EmbeddingVector(dim));
  const char* p = bytes.data() + 12;
  for (std::uint32_t i = 0; i < count; ++i)
    for (std::uint32_t d = 0; d < dim; ++d, p += 4)
      out[i][d] = std::bit_cast<float>(read_u32_le(p));
  return out;
}

std::string encode_embeddings(const std::vector<EmbeddingVector>& vectors) {
  const std::uint32_t dim = vectors.empty() ? 1 : static_cast<std::uint32_t>(vectors.front().size());
  std::string out(kEmbeddingMagic, 4);
  write_u32_le(out, dim);
  write_u32_le(out, static_cast<std::uint32_t>(vectors.size()));
  for (const auto& v : vectors) {
    if (static_cast<std::uint32_t>(v.size()) != dim)
      throw Error(ErrorCode::DimensionMismatch, "embedding file: inconsistent dimensions");
    for (Eigen::Index d = 0; d < v.size(); ++d)
      write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v[d])));
  }
  return out;
}

PatchEmbeddingSet load_patch_embeddings(const fs::path& path) {
  try {
    return PatchEmbeddingSet::from_vectors(decode_embeddings(read_file(path)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::string explain_dot(const SceneGraph& g1, const SceneGraph& g2, const ScoreReport& report) {
  std::ostringstream os;
  os << "digraph sess_matching {\n"
     << "  rankdir=LR;\n"
     << "  label=\"sess=" << format_number(report.sess, 4)
     << " graph=" << format_number(report.graph_score, 4)
     << " image=" << format_number(report.image_score, 4) << "\";\n";
  auto cluster = [&](const SceneGraph& g, const char* prefix, const char* title) {
    os << "  subgraph cluster_" << prefix << " {\n"
       << "    label=\"" << dot_escape(title) << ": " << dot_escape(g.image.id) << "\";\n";
    for (const auto& n : g.nodes)
      os << "    \"" << prefix << n.id << "\" [label=\"" << dot_escape(n.label) << " #" << n.id
         << "\"];\n";
    for (const auto& e : g.edges)
      os << "    \"" << prefix << e.subject << "\" -> \"" << prefix << e.object << "\" [label=\""
         << dot_escape(e.relation) << "\", style=dashed];\n";
    os << "  }\n";
  };
  cluster(g1, "a", "reference");
  cluster(g2, "b", "candidate");
  for (const auto& m : report.matching)
    os << "  \"a" << m.node1 << "\" -> \"b" << m.node2 << "\" [dir=none, color=blue, label=\"("
       << format_number(m.weight, 3) << ", " << format_number(m.similarity, 3) << ")\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace sess::io
