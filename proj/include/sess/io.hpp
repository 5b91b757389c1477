#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sess/core.hpp"
#include "sess/metrics.hpp"
#include "sess/raster.hpp"
#include "sess/tuning.hpp"

namespace sess::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

// Scene graph files ---------------------------------------------------------

/// Parses a graph document and validates it. Syntax errors throw ParseError
/// naming the byte offset; schema and invariant failures throw ParseError or
/// InvalidGraph naming the field. `strict` rejects unknown fields.
SceneGraph parse_graph(std::string_view text, bool strict = false);
SceneGraph load_graph(const fs::path& path, bool strict = false);

/// Canonical form: sorted keys, two-space indent, shortest round-trip
/// number formatting, trailing newline.
std::string dump_graph(const SceneGraph& g);
void save_graph(const fs::path& path, const SceneGraph& g);

// Relation tables and hyperparameters ----------------------------------------

RelationSimilarityTable parse_relation_table(std::string_view text);
RelationSimilarityTable load_relation_table(const fs::path& path);
std::string dump_relation_table(const RelationSimilarityTable& table);

/// Accepts a bare HyperParams object or one nested under "params"; missing
/// fields keep their defaults.
HyperParams parse_params(std::string_view text);
HyperParams load_params(const fs::path& path);
std::string dump_params(const HyperParams& p);

// Experiment manifests --------------------------------------------------------

struct ManifestEntry {
  std::size_t line = 0;
  fs::path ref_graph;
  fs::path cand_graph;
  std::string condition_name;
  double condition_value = 0;
  std::optional<fs::path> ref_raster, cand_raster;
  std::optional<fs::path> ref_patches, cand_patches;
};

/// One entry per nonblank line; relative paths resolve against `base_dir`.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const fs::path& base_dir = {},
                                          bool strict = false);
std::vector<ManifestEntry> load_manifest(const fs::path& path, bool strict = false);

// Annotation datasets ----------------------------------------------------------

std::vector<AnnotationRecord> parse_annotations(std::string_view text);
std::vector<AnnotationRecord> load_annotations(const fs::path& path);

/// Loads every referenced graph once. Throws MissingGraphFile when a file is
/// absent or unreadable.
AnnotatedDataset resolve_annotations(const std::vector<AnnotationRecord>& records,
                                     const fs::path& base_dir = {}, bool strict = false);

// Rasters ---------------------------------------------------------------------

/// PNG (8-bit, alpha stripped) or binary PGM/PPM (maxval 255).
/// Throws UnsupportedFormat or CorruptFile.
Raster decode_raster(std::string_view bytes);
Raster load_raster(const fs::path& path);
std::string encode_pnm(const Raster& r);
std::string encode_png(const Raster& r);

// Embedding sidecar files --------------------------------------------------------

/// Little-endian layout: "SEMB", uint32 dimension, uint32 count, then
/// count * dimension float32 values, one vector after another.
std::vector<EmbeddingVector> decode_embeddings(std::string_view bytes);
std::string encode_embeddings(const std::vector<EmbeddingVector>& vectors);
PatchEmbeddingSet load_patch_embeddings(const fs::path& path);

// Reports ---------------------------------------------------------------------------

/// Fixed-notation rendering used in CSV and text output; "inf" for +inf.
std::string format_number(double v, int precision = 9);

std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);

std::string report_to_json(const ScoreReport& report);

/// Bipartite DOT graph of the final matching; match edges carry
/// "(weight, similarity)" labels.
std::string explain_dot(const SceneGraph& g1, const SceneGraph& g2, const ScoreReport& report);

}  // namespace sess::io
