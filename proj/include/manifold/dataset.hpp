#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "manifold/csv.hpp"
#include "manifold/error.hpp"

namespace manifold {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n x d feature matrix, one row per sample, with unique string ids.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  EmbeddingMatrix(Matrix values, std::vector<std::string> ids)
      : values_(std::move(values)), ids_(std::move(ids)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw Error(ErrorKind::EmptyInput, "rows=" + std::to_string(values_.rows()) +
                                             " cols=" + std::to_string(values_.cols()));
    if (static_cast<Eigen::Index>(ids_.size()) != values_.rows())
      throw Error(ErrorKind::ShapeMismatch, "ids=" + std::to_string(ids_.size()) +
                                                " rows=" + std::to_string(values_.rows()));
    if (!values_.allFinite()) throw Error(ErrorKind::Format, "non-finite value in matrix");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_)
      if (!seen.insert(id).second) throw Error(ErrorKind::DuplicateKey, "id=" + id);
  }

  /// Ids default to "0".."n-1".
  explicit EmbeddingMatrix(Matrix values) : EmbeddingMatrix(values, default_ids(values.rows())) {}

  std::size_t n_samples() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& ids() const { return ids_; }

  static std::vector<std::string> default_ids(Eigen::Index n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
  }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.ids_ == b.ids_ && a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Matrix values_;
  std::vector<std::string> ids_;
};

enum class MatrixFormat { Csv, BinaryF64 };

/// Binary layout (little-endian): "MF64", u32 version (=1), u32 n, u32 d,
/// then n*d doubles row-major. Sample ids are not stored.
inline constexpr char kBinaryMagic[4] = {'M', 'F', '6', '4'};

inline MatrixFormat format_from_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    if (ext == "bin" || ext == "f64") return MatrixFormat::BinaryF64;
  }
  return MatrixFormat::Csv;
}

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline double read_f64_le(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | p[i];
  return std::bit_cast<double>(u);
}

inline void write_f64_le(std::ostream& out, double v) {
  auto u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline EmbeddingMatrix load_csv_matrix(const std::string& path) {
  auto records = csv::read(path);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "file=" + path + " rows=0");

  // A header is present if the first record names an "id" column or has a
  // non-numeric feature cell. Without a header the first column holds ids.
  std::size_t id_col = 0;
  std::size_t first = 0;
  {
    const auto& h = records.front().fields;
    auto it = std::find(h.begin(), h.end(), "id");
    bool non_numeric = false;
    for (std::size_t c = 1; c < h.size(); ++c) {
      double v;
      if (!csv::parse_double(h[c], v)) non_numeric = true;
    }
    if (it != h.end()) {
      id_col = static_cast<std::size_t>(it - h.begin());
      first = 1;
    } else if (non_numeric) {
      throw Error(ErrorKind::Format, "file=" + path + " line=" + std::to_string(records[0].line) +
                                         " header has no 'id' column");
    }
  }
  if (first == records.size()) throw Error(ErrorKind::EmptyInput, "file=" + path + " rows=0");

  const std::size_t width = records[first].fields.size();
  if (width < 2)
    throw Error(ErrorKind::Format, "file=" + path + " line=" + std::to_string(records[first].line) +
                                       " no feature columns");
  const std::size_t n = records.size() - first;
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width - 1));
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "file=" + path + " line=" + std::to_string(rec.line);
    if (rec.fields.size() != width)
      throw Error(ErrorKind::Format, where + " ragged row: expected " + std::to_string(width) +
                                         " fields, got " + std::to_string(rec.fields.size()));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == id_col) continue;
      double v;
      if (!csv::parse_double(rec.fields[c], v))
        throw Error(ErrorKind::Format, where + " non-numeric cell '" + rec.fields[c] + "'");
      if (!std::isfinite(v))
        throw Error(ErrorKind::Format, where + " non-finite cell '" + rec.fields[c] + "'");
      values(static_cast<Eigen::Index>(r - first), col++) = v;
    }
    ids.push_back(rec.fields[id_col]);
  }
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < ids.size(); ++r)
    if (!seen.insert(ids[r]).second)
      throw Error(ErrorKind::DuplicateKey,
                  "file=" + path + " line=" + std::to_string(records[r + first].line) + " id=" + ids[r]);
  return EmbeddingMatrix(std::move(values), std::move(ids));
}

inline EmbeddingMatrix load_binary_matrix(const std::string& path) {
  const std::string bytes = csv::read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16) throw Error(ErrorKind::Format, "file=" + path + " truncated header");
  if (std::memcmp(p, kBinaryMagic, 4) != 0) throw Error(ErrorKind::Format, "file=" + path + " bad magic");
  if (read_u32_le(p + 4) != 1) throw Error(ErrorKind::Format, "file=" + path + " unsupported version");
  const std::uint64_t n = read_u32_le(p + 8);
  const std::uint64_t d = read_u32_le(p + 12);
  if (n == 0) throw Error(ErrorKind::EmptyInput, "file=" + path + " rows=0");
  if (d == 0) throw Error(ErrorKind::Format, "file=" + path + " cols=0");
  if (bytes.size() != 16 + n * d * 8)
    throw Error(ErrorKind::Format, "file=" + path + " size mismatch: header says " + std::to_string(n) +
                                       "x" + std::to_string(d));
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < d; ++j) {
      double v = read_f64_le(p + 16 + 8 * (i * d + j));
      if (!std::isfinite(v))
        throw Error(ErrorKind::Format, "file=" + path + " row=" + std::to_string(i) + " non-finite value");
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  return EmbeddingMatrix(std::move(values));
}

}  // namespace detail

/// Loads a feature matrix. CSV rows are "id,x1,...,xd", with an optional
/// header whose id column is named "id".
inline EmbeddingMatrix load_embeddings(const std::string& path, MatrixFormat format) {
  return format == MatrixFormat::Csv ? detail::load_csv_matrix(path) : detail::load_binary_matrix(path);
}

inline EmbeddingMatrix load_embeddings(const std::string& path) {
  return load_embeddings(path, format_from_path(path));
}

/// Writes "id,x1..xd" with a header row; values use shortest round-trip text.
inline void write_embeddings_csv(std::ostream& out, const Matrix& values,
                                 const std::vector<std::string>& ids, const std::string& prefix = "x") {
  out << "id";
  for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << prefix << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << csv::escape(ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << csv::format_double(values(i, j));
    out << '\n';
  }
}

inline void save_embeddings(const std::string& path, const EmbeddingMatrix& m, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "path=" + path + " cannot open for writing");
  if (format == MatrixFormat::Csv) {
    write_embeddings_csv(out, m.values(), m.ids());
  } else {
    out.write(kBinaryMagic, 4);
    detail::write_u32_le(out, 1);
    detail::write_u32_le(out, static_cast<std::uint32_t>(m.n_samples()));
    detail::write_u32_le(out, static_cast<std::uint32_t>(m.n_features()));
    for (Eigen::Index i = 0; i < m.values().rows(); ++i)
      for (Eigen::Index j = 0; j < m.values().cols(); ++j) detail::write_f64_le(out, m.values()(i, j));
  }
  if (!out) throw Error(ErrorKind::Io, "path=" + path + " write failed");
}

/// Per-sample categorical metadata keyed by id. Columns keep file order.
class AnnotationTable {
 public:
  AnnotationTable() = default;

  AnnotationTable(std::vector<std::string> ids, std::vector<std::string> column_names,
                  std::vector<std::vector<std::string>> columns,
                  std::map<std::string, std::vector<std::string>> declared_labels = {})
      : ids_(std::move(ids)),
        names_(std::move(column_names)),
        columns_(std::move(columns)),
        declared_(std::move(declared_labels)) {
    if (names_.size() != columns_.size()) throw Error(ErrorKind::ShapeMismatch, "column count mismatch");
    for (const auto& c : columns_)
      if (c.size() != ids_.size()) throw Error(ErrorKind::ShapeMismatch, "column length mismatch");
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!index_.emplace(ids_[i], i).second) throw Error(ErrorKind::DuplicateKey, "id=" + ids_[i]);
    for (const auto& [col, labels] : declared_) {
      const auto& values = column(col);
      std::set<std::string> allowed(labels.begin(), labels.end());
      for (std::size_t i = 0; i < values.size(); ++i)
        if (!allowed.count(values[i]))
          throw Error(ErrorKind::UnknownLabel, "column=" + col + " id=" + ids_[i] + " label=" + values[i]);
    }
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& column_names() const { return names_; }
  bool has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  const std::vector<std::string>& column(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(ErrorKind::MissingColumn, "column=" + name);
    return columns_[static_cast<std::size_t>(it - names_.begin())];
  }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Declared label set if one was supplied, otherwise the sorted observed values.
  std::vector<std::string> label_set(const std::string& name) const {
    if (auto it = declared_.find(name); it != declared_.end()) return it->second;
    const auto& values = column(name);
    std::set<std::string> s(values.begin(), values.end());
    return {s.begin(), s.end()};
  }

  std::map<std::string, std::size_t> histogram(const std::string& name) const {
    std::map<std::string, std::size_t> h;
    for (const auto& v : column(name)) ++h[v];
    return h;
  }

  const std::map<std::string, std::vector<std::string>>& declared_labels() const { return declared_; }
  const std::vector<std::vector<std::string>>& columns() const { return columns_; }

  friend bool operator==(const AnnotationTable& a, const AnnotationTable& b) {
    return a.ids_ == b.ids_ && a.names_ == b.names_ && a.columns_ == b.columns_ && a.declared_ == b.declared_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> columns_;
  std::map<std::string, std::vector<std::string>> declared_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads an annotation CSV. The header must contain an "id" column and at
/// least one other column.
inline AnnotationTable load_annotations(const std::string& path,
                                        std::map<std::string, std::vector<std::string>> declared = {}) {
  auto records = csv::read(path);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "file=" + path + " rows=0");
  const auto& header = records.front().fields;
  auto id_it = std::find(header.begin(), header.end(), "id");
  if (id_it == header.end()) throw Error(ErrorKind::MissingColumn, "file=" + path + " line=1 column=id");
  if (header.size() < 2) throw Error(ErrorKind::MissingColumn, "file=" + path + " line=1 no label column");
  const auto id_col = static_cast<std::size_t>(id_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != id_col) names.push_back(header[c]);
  std::vector<std::vector<std::string>> columns(names.size());
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "file=" + path + " line=" + std::to_string(rec.line);
    if (rec.fields.size() != header.size())
      throw Error(ErrorKind::Format, where + " expected " + std::to_string(header.size()) + " fields, got " +
                                         std::to_string(rec.fields.size()));
    const auto& id = rec.fields[id_col];
    if (!seen.insert(id).second) throw Error(ErrorKind::DuplicateKey, where + " id=" + id);
    ids.push_back(id);
    std::size_t k = 0;
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != id_col) columns[k++].push_back(rec.fields[c]);
  }
  return AnnotationTable(std::move(ids), std::move(names), std::move(columns), std::move(declared));
}

inline void save_annotations(const std::string& path, const AnnotationTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "path=" + path + " cannot open for writing");
  out << "id";
  for (const auto& n : t.column_names()) out << ',' << csv::escape(n);
  out << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << csv::escape(t.ids()[i]);
    for (const auto& c : t.columns()) out << ',' << csv::escape(c[i]);
    out << '\n';
  }
}

/// Replaces labels of `column` according to `mapping`. Every source label must
/// belong to the column's label set.
inline AnnotationTable merge_categories(const AnnotationTable& table, const std::string& column,
                                        const std::map<std::string, std::string>& mapping) {
  const auto labels = table.label_set(column);
  for (const auto& [from, to] : mapping)
    if (std::find(labels.begin(), labels.end(), from) == labels.end())
      throw Error(ErrorKind::UnknownLabel, "column=" + column + " label=" + from);
  if (mapping.empty()) return table;

  auto columns = table.columns();
  const auto& names = table.column_names();
  const auto idx = static_cast<std::size_t>(std::find(names.begin(), names.end(), column) - names.begin());
  for (auto& v : columns[idx])
    if (auto it = mapping.find(v); it != mapping.end()) v = it->second;

  auto declared = table.declared_labels();
  if (auto it = declared.find(column); it != declared.end()) {
    std::vector<std::string> merged;
    for (const auto& l : it->second) {
      auto m = mapping.find(l);
      const std::string& nl = m == mapping.end() ? l : m->second;
      if (std::find(merged.begin(), merged.end(), nl) == merged.end()) merged.push_back(nl);
    }
    it->second = std::move(merged);
  }
  return AnnotationTable(table.ids(), names, std::move(columns), std::move(declared));
}

struct LabeledDataset {
  EmbeddingMatrix embeddings;
  AnnotationTable annotations;
  std::string label_column;
  std::size_t dropped_embeddings = 0;   // embedding ids without an annotation
  std::size_t dropped_annotations = 0;  // annotation ids without an embedding

  std::size_t dropped() const { return dropped_embeddings + dropped_annotations; }
  const std::vector<std::string>& labels() const { return annotations.column(label_column); }
};

/// Restricts both inputs to their common ids, in annotation order. Samples
/// present on only one side are dropped with a warning.
inline LabeledDataset join(const EmbeddingMatrix& embeddings, const AnnotationTable& annotations,
                           const std::string& label_column) {
  (void)annotations.column(label_column);
  std::unordered_map<std::string, std::size_t> emb_index;
  for (std::size_t i = 0; i < embeddings.n_samples(); ++i) emb_index.emplace(embeddings.ids()[i], i);

  std::vector<std::size_t> ann_rows, emb_rows;
  for (std::size_t i = 0; i < annotations.size(); ++i)
    if (auto it = emb_index.find(annotations.ids()[i]); it != emb_index.end()) {
      ann_rows.push_back(i);
      emb_rows.push_back(it->second);
    }
  if (ann_rows.empty())
    throw Error(ErrorKind::EmptyIntersection, "embeddings=" + std::to_string(embeddings.n_samples()) +
                                                  " annotations=" + std::to_string(annotations.size()));

  Matrix values(static_cast<Eigen::Index>(emb_rows.size()), embeddings.values().cols());
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < emb_rows.size(); ++r) {
    values.row(static_cast<Eigen::Index>(r)) = embeddings.values().row(static_cast<Eigen::Index>(emb_rows[r]));
    ids.push_back(embeddings.ids()[emb_rows[r]]);
  }
  std::vector<std::vector<std::string>> columns(annotations.column_names().size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (auto r : ann_rows) columns[c].push_back(annotations.columns()[c][r]);

  LabeledDataset ds{EmbeddingMatrix(std::move(values), ids),
                    AnnotationTable(ids, annotations.column_names(), std::move(columns),
                                    annotations.declared_labels()),
                    label_column, embeddings.n_samples() - ann_rows.size(), annotations.size() - ann_rows.size()};
  if (ds.dropped() > 0)
    warn("join dropped " + std::to_string(ds.dropped()) + " samples (" + std::to_string(ds.dropped_embeddings) +
         " without annotation, " + std::to_string(ds.dropped_annotations) + " without embedding)");
  return ds;
}

}  // namespace manifold
