#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "manifold/app/svg.hpp"
#include "manifold/app/toml.hpp"
#include "manifold/manifold.hpp"

namespace manifold::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"laplacian_eigenmaps", "lle",  "isomap", "classical_mds",
                                                 "smacof",              "tsne", "phate"};
  return names;
}

/// Everything needed to reproduce one embedding. Unset hyperparameters take
/// per-algorithm defaults, which are resolved and written to the manifest.
struct RunConfig {
  std::string algorithm;
  std::string input;
  std::string annotations;  // optional; restricts the run to annotated ids
  std::string label = "label";
  std::string out = ".";
  std::uint64_t seed = 0;
  std::optional<std::size_t> k;
  std::optional<double> sigma;
  std::optional<double> perplexity;
  std::optional<double> alpha;
  std::optional<std::size_t> t;
  std::size_t dim = 2;
  std::optional<std::size_t> iters;
  std::optional<double> eps;
  std::optional<double> reg;
  std::optional<std::size_t> t_max;
  std::string metric = "euclidean";
  bool trace = false;  // write loss trace (t-SNE, SMACOF) or entropy curve (PHATE)
};

inline void validate(const RunConfig& c) {
  const auto& names = algorithm_names();
  if (std::find(names.begin(), names.end(), c.algorithm) == names.end())
    throw Error(ErrorKind::Config, "unknown algorithm '" + c.algorithm + "'");
  if (c.input.empty()) throw Error(ErrorKind::Config, "missing input path");
  if (c.dim < 1) throw Error(ErrorKind::Config, "dim must be >= 1");
  (void)metric_from_name(c.metric);
}

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
inline std::string file_checksum(const std::string& path) {
  const std::string bytes = csv::read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "path=" + path.string() + " cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "path=" + path.string() + " write failed");
}

/// Loads the input matrix and, when annotations are given, restricts it to
/// annotated ids in annotation order.
inline EmbeddingMatrix load_run_input(const RunConfig& c, std::size_t& dropped) {
  auto X = load_embeddings(c.input);
  dropped = 0;
  if (c.annotations.empty()) return X;
  auto ann = load_annotations(c.annotations);
  const std::string col = ann.has_column(c.label) ? c.label : ann.column_names().front();
  auto ds = join(X, ann, col);
  dropped = ds.dropped();
  return ds.embeddings;
}

struct EmbedOutputs {
  fs::path embedding;
  fs::path manifest;
  Embedding result;
};

/// Runs one algorithm and writes <out>/<algorithm>.csv (id,y1..ym) and
/// <out>/<algorithm>.manifest.json.
inline EmbedOutputs run_embed(const RunConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  std::size_t dropped = 0;
  const auto X = load_run_input(c, dropped);
  const Matrix& V = X.values();
  const Metric metric = metric_from_name(c.metric);
  const fs::path out_dir(c.out);
  fs::create_directories(out_dir);

  Embedding e;
  json resolved;
  std::vector<std::pair<std::string, std::vector<double>>> traces;  // name -> values

  if (c.algorithm == "laplacian_eigenmaps") {
    const std::size_t k = c.k.value_or(10);
    const auto D = pairwise_distances(V, metric);
    const auto knn = knn_graph(D, k);
    double sigma = 0.0;
    if (c.sigma) {
      sigma = *c.sigma;
    } else {
      // mean distance to the k-th neighbor
      for (std::size_t i = 0; i < knn.n(); ++i) sigma += knn.neighbors(i).back().distance;
      sigma /= static_cast<double>(knn.n());
      if (!(sigma > 0.0)) sigma = 1.0;
    }
    e = laplacian_eigenmaps(gaussian_affinity(D, sigma, knn), c.dim);
    resolved = {{"k", k}, {"sigma", sigma}, {"dim", c.dim}};
  } else if (c.algorithm == "lle") {
    const std::size_t k = c.k.value_or(10);
    const double reg = c.reg.value_or(1e-3);
    e = lle(V, k, c.dim, reg, metric);
    resolved = {{"k", k}, {"reg", reg}, {"dim", c.dim}};
  } else if (c.algorithm == "isomap") {
    const std::size_t k = c.k.value_or(10);
    e = isomap(V, k, c.dim, metric);
    resolved = {{"k", k}, {"dim", c.dim}};
  } else if (c.algorithm == "classical_mds") {
    e = classical_mds(pairwise_distances(V, metric), c.dim);
    resolved = {{"dim", c.dim}};
  } else if (c.algorithm == "smacof") {
    SmacofOptions o{c.iters.value_or(300), c.eps.value_or(1e-6), c.seed};
    const auto D = pairwise_distances(V, metric);
    auto r = smacof_mds(D.values(), c.dim, o);
    e = std::move(r.embedding);
    traces.push_back({"stress", r.stress});
    resolved = {{"dim", c.dim}, {"iters", o.max_iter}, {"eps", o.eps}, {"iterations_run", r.iterations}};
  } else if (c.algorithm == "tsne") {
    TsneConfig cfg;
    cfg.perplexity = c.perplexity.value_or(30.0);
    cfg.dim = c.dim;
    cfg.max_iter = c.iters.value_or(1000);
    cfg.seed = c.seed;
    const auto cal = calibrate_perplexity(pairwise_distances(V, metric), cfg.perplexity);
    auto r = tsne_embed(cal, cfg);
    e = std::move(r.embedding);
    traces.push_back({"kl", r.kl});
    resolved = e.params;
  } else if (c.algorithm == "phate") {
    PhateOptions o;
    o.k = c.k.value_or(5);
    o.alpha = c.alpha.value_or(40.0);
    o.dim = c.dim;
    o.t = c.t;
    o.t_max = c.t_max.value_or(100);
    o.smacof_iters = c.iters.value_or(300);
    o.smacof_eps = c.eps.value_or(1e-6);
    o.seed = c.seed;
    o.metric = metric;
    auto r = phate_embed(V, o);
    e = std::move(r.embedding);
    if (!r.entropy.empty()) traces.push_back({"entropy", r.entropy});
    resolved = e.params;
  }
  e.ids = X.ids();
  e.seed = c.seed;
  check_finite(e);

  const fs::path emb_path = out_dir / (c.algorithm + ".csv");
  {
    std::ofstream out(emb_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "path=" + emb_path.string() + " cannot open for writing");
    write_embeddings_csv(out, e.coords, e.ids, "y");
  }
  json trace_files = json::object();
  if (c.trace)
    for (const auto& [name, values] : traces) {
      const fs::path p = out_dir / (c.algorithm + "." + name + ".csv");
      std::ostringstream s;
      s << (name == "entropy" ? "t" : "iter") << ',' << name << '\n';
      for (std::size_t i = 0; i < values.size(); ++i)
        s << (name == "entropy" ? i + 1 : i) << ',' << csv::format_double(values[i]) << '\n';
      write_text(p, s.str());
      trace_files[name] = p.filename().string();
    }

  json inputs = json::array();
  inputs.push_back({{"role", "input"}, {"path", c.input}, {"fnv1a64", file_checksum(c.input)}});
  if (!c.annotations.empty())
    inputs.push_back({{"role", "annotations"}, {"path", c.annotations}, {"fnv1a64", file_checksum(c.annotations)}});
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"algorithm", c.algorithm},
                   {"seed", c.seed},
                   {"metric", c.metric},
                   {"hyperparameters", resolved},
                   {"n_samples", e.n()},
                   {"dim", e.dim()},
                   {"dropped_samples", dropped},
                   {"inputs", inputs},
                   {"embedding", emb_path.filename().string()},
                   {"embedding_fnv1a64", file_checksum(emb_path.string())},
                   {"traces", trace_files},
                   {"wall_time_seconds", wall}};
  const fs::path man_path = out_dir / (c.algorithm + ".manifest.json");
  write_text(man_path, manifest.dump(2) + "\n");
  return {emb_path, man_path, std::move(e)};
}

struct EvaluateArgs {
  std::string embedding;
  std::string input;
  std::string annotations;
  std::string label = "label";
  std::size_t k = 10;
  std::string out_prefix;  // defaults to the embedding path without extension + ".quality"
};

struct EvaluateOutputs {
  QualityReport report;
  fs::path json_path;
  fs::path text_path;
};

namespace detail {

/// Rows of `source` reordered to match `ids`; IdMismatch if any id is absent.
inline Matrix align_rows(const EmbeddingMatrix& source, const std::vector<std::string>& ids, const std::string& what) {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < source.n_samples(); ++i) index.emplace(source.ids()[i], static_cast<Eigen::Index>(i));
  Matrix out(static_cast<Eigen::Index>(ids.size()), source.values().cols());
  std::size_t missing = 0;
  std::string first;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto it = index.find(ids[r]);
    if (it == index.end()) {
      if (missing++ == 0) first = ids[r];
      continue;
    }
    out.row(static_cast<Eigen::Index>(r)) = source.values().row(it->second);
  }
  if (missing)
    throw Error(ErrorKind::IdMismatch, what + " missing=" + std::to_string(missing) + " first=" + first);
  return out;
}

inline std::vector<std::string> aligned_labels(const AnnotationTable& ann, const std::vector<std::string>& ids,
                                               const std::string& label) {
  const auto& col = ann.column(label);
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  std::size_t missing = 0;
  std::string first;
  for (const auto& id : ids) {
    auto row = ann.find(id);
    if (!row) {
      if (missing++ == 0) first = id;
      labels.emplace_back();
      continue;
    }
    labels.push_back(col[*row]);
  }
  if (missing)
    throw Error(ErrorKind::IdMismatch, "annotations missing=" + std::to_string(missing) + " first=" + first);
  return labels;
}

}  // namespace detail

/// Scores an embedding file against the original features and labels and
/// writes <prefix>.json and <prefix>.txt.
inline EvaluateOutputs run_evaluate(const EvaluateArgs& a) {
  const auto Y = load_embeddings(a.embedding);
  const auto ann = load_annotations(a.annotations);
  if (!ann.has_column(a.label)) throw Error(ErrorKind::MissingColumn, "column=" + a.label);
  const auto X = load_embeddings(a.input);
  const auto labels = detail::aligned_labels(ann, Y.ids(), a.label);
  const Matrix Xa = detail::align_rows(X, Y.ids(), "input");

  EvaluateOutputs o;
  o.report = evaluate(Xa, Y.values(), labels, a.k, a.label);
  std::string prefix = a.out_prefix;
  if (prefix.empty()) {
    fs::path p(a.embedding);
    prefix = (p.parent_path() / p.stem()).string() + ".quality";
  }
  o.json_path = prefix + ".json";
  o.text_path = prefix + ".txt";
  write_text(o.json_path, to_json(o.report).dump(2) + "\n");
  write_text(o.text_path, to_text(o.report));
  return o;
}

struct PlotArgs {
  std::string embedding;
  std::string annotations;
  std::string out;
  plot::PlotSpec spec;
};

/// Writes an SVG scatter of the embedding colored by an annotation column.
inline std::string run_plot(const PlotArgs& a) {
  const auto Y = load_embeddings(a.embedding);
  const auto ann = load_annotations(a.annotations);
  if (!ann.has_column(a.spec.color_by)) throw Error(ErrorKind::MissingColumn, "column=" + a.spec.color_by);
  const auto ds = join(Y, ann, a.spec.color_by);
  const std::string svg = plot::render_svg(ds.embeddings.values(), ds.labels(), a.spec);
  if (!a.out.empty()) {
    const fs::path p(a.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, svg);
  }
  return svg;
}

/// Parses a TOML or JSON document into JSON. JSON is detected by extension
/// or by a leading '{'.
inline json load_config_document(const std::string& path) {
  const std::string text = csv::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool is_json = fs::path(path).extension() == ".json" || (first != std::string::npos && text[first] == '{');
  if (is_json) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Config, "file=" + path + " " + e.what());
    }
  }
  return toml::parse(text, path);
}

namespace detail {

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, std::string("key '") + key + "' has the wrong type");
  }
}

inline void apply_params(RunConfig& c, const json& p) {
  if (!p.is_object()) return;
  if (auto v = opt_get<std::size_t>(p, "k")) c.k = v;
  if (auto v = opt_get<double>(p, "sigma")) c.sigma = v;
  if (auto v = opt_get<double>(p, "perplexity")) c.perplexity = v;
  if (auto v = opt_get<double>(p, "alpha")) c.alpha = v;
  if (auto v = opt_get<std::size_t>(p, "t")) c.t = v;
  if (auto v = opt_get<std::size_t>(p, "t_max")) c.t_max = v;
  if (auto v = opt_get<std::size_t>(p, "dim")) c.dim = *v;
  if (auto v = opt_get<std::size_t>(p, "iters")) c.iters = v;
  if (auto v = opt_get<double>(p, "eps")) c.eps = v;
  if (auto v = opt_get<double>(p, "reg")) c.reg = v;
  if (auto v = opt_get<std::string>(p, "metric")) c.metric = *v;
}

}  // namespace detail

struct PipelineOutputs {
  std::vector<fs::path> embeddings, reports, plots;
  fs::path summary_json, summary_text;
  std::vector<std::string> labels;
};

/// merge -> embed -> evaluate -> plot for every configured algorithm, then a
/// cross-algorithm summary. Relative paths resolve against the config file's
/// directory. Stops at the first failing stage; earlier artifacts remain.
inline PipelineOutputs run_pipeline(const std::string& config_path, std::ostream* log = nullptr) {
  const json cfg = load_config_document(config_path);
  const fs::path base = fs::absolute(config_path).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
  auto required = [&](const char* key) {
    auto v = detail::opt_get<std::string>(cfg, key);
    if (!v) throw Error(ErrorKind::Config, std::string("missing key '") + key + "'");
    return *v;
  };

  const std::string input = resolve(required("input"));
  const std::string annotations = resolve(required("annotations"));
  const std::string label = detail::opt_get<std::string>(cfg, "label").value_or("label");
  const fs::path out = resolve(detail::opt_get<std::string>(cfg, "out").value_or("out"));
  const std::uint64_t seed = detail::opt_get<std::uint64_t>(cfg, "seed").value_or(0);
  const std::size_t eval_k = detail::opt_get<std::size_t>(cfg, "eval_k").value_or(10);
  std::vector<std::string> algorithms = algorithm_names();
  if (cfg.contains("algorithms")) {
    try {
      algorithms = cfg["algorithms"].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::Config, "'algorithms' must be a list of names");
    }
  }
  for (const auto& a : algorithms) {
    const auto& names = algorithm_names();
    if (std::find(names.begin(), names.end(), a) == names.end())
      throw Error(ErrorKind::Config, "unknown algorithm '" + a + "'");
  }
  fs::create_directories(out);

  // Merge stage: writes the annotation table every later stage reads.
  auto table = load_annotations(annotations);
  if (cfg.contains("merge")) {
    const auto& m = cfg["merge"];
    const std::string column = detail::opt_get<std::string>(m, "column").value_or(label);
    std::map<std::string, std::string> mapping;
    if (m.contains("mapping")) {
      if (!m["mapping"].is_object()) throw Error(ErrorKind::Config, "merge.mapping must be a table");
      for (const auto& [from, to] : m["mapping"].items()) {
        if (!to.is_string()) throw Error(ErrorKind::Config, "merge.mapping values must be strings");
        mapping[from] = to.get<std::string>();
      }
    }
    table = merge_categories(table, column, mapping);
  }
  const fs::path merged = out / "annotations.csv";
  save_annotations(merged.string(), table);

  plot::PlotSpec spec;
  spec.color_by = label;
  if (cfg.contains("plot")) {
    const auto& p = cfg["plot"];
    spec.color_by = detail::opt_get<std::string>(p, "color_by").value_or(label);
    spec.width = detail::opt_get<int>(p, "width").value_or(spec.width);
    spec.height = detail::opt_get<int>(p, "height").value_or(spec.height);
    spec.radius = detail::opt_get<double>(p, "radius").value_or(spec.radius);
    spec.legend = detail::opt_get<bool>(p, "legend").value_or(spec.legend);
  }

  const json params = cfg.contains("params") ? cfg["params"] : json::object();
  PipelineOutputs res;
  json rows = json::array();
  for (const auto& algo : algorithms) {
    RunConfig rc;
    rc.algorithm = algo;
    rc.input = input;
    rc.annotations = merged.string();
    rc.label = label;
    rc.out = out.string();
    rc.seed = seed;
    if (auto v = detail::opt_get<std::string>(cfg, "metric")) rc.metric = *v;
    detail::apply_params(rc, params);
    if (params.contains(algo)) detail::apply_params(rc, params[algo]);
    if (log) *log << "[pipeline] embed " << algo << '\n';
    auto emb = run_embed(rc);
    res.embeddings.push_back(emb.embedding);

    if (log) *log << "[pipeline] evaluate " << algo << '\n';
    auto ev = run_evaluate({emb.embedding.string(), input, merged.string(), label, eval_k, ""});
    res.reports.push_back(ev.json_path);

    if (log) *log << "[pipeline] plot " << algo << '\n';
    const fs::path svg = out / (algo + ".svg");
    run_plot({emb.embedding.string(), merged.string(), svg.string(), spec});
    res.plots.push_back(svg);

    json row = to_json(ev.report);
    row["algorithm"] = algo;
    rows.push_back(row);
  }

  // Labels present in the analysed samples (after join).
  {
    std::size_t dropped = 0;
    RunConfig rc;
    rc.input = input;
    rc.annotations = merged.string();
    rc.label = label;
    const auto X = load_run_input(rc, dropped);
    const auto& col = table.column(label);
    std::set<std::string> seen;
    for (const auto& id : X.ids()) seen.insert(col[*table.find(id)]);
    res.labels.assign(seen.begin(), seen.end());
  }

  json summary = {{"seed", seed},     {"label_column", label}, {"labels", res.labels},
                  {"n_labels", res.labels.size()}, {"eval_k", eval_k}, {"algorithms", rows}};
  res.summary_json = out / "summary.json";
  write_text(res.summary_json, summary.dump(2) + "\n");

  std::ostringstream t;
  t << "label column: " << label << " (" << res.labels.size() << " labels:";
  for (std::size_t i = 0; i < res.labels.size(); ++i) t << (i ? ", " : " ") << res.labels[i];
  t << ")\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %15s %11s %10s %11s\n", "algorithm", "trustworthiness", "continuity",
                "knn_agree", "silhouette");
  t << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-20s %15.4f %11.4f %10.4f %11.4f\n", r["algorithm"].get<std::string>().c_str(),
                  r["trustworthiness"].get<double>(), r["continuity"].get<double>(),
                  r["knn_label_agreement"].get<double>(), r["silhouette"].get<double>());
    t << line;
  }
  res.summary_text = out / "summary.txt";
  write_text(res.summary_text, t.str());
  return res;
}

/// Writes embeddings.csv, annotations.csv (id,label) and ground_truth.csv
/// for a synthetic dataset into `out`.
inline void write_fixture(const fixtures::SyntheticSpec& spec, const fs::path& out) {
  fs::create_directories(out);
  const auto s = fixtures::generate(spec);
  save_embeddings((out / "embeddings.csv").string(), s.dataset.embeddings, MatrixFormat::Csv);
  save_annotations((out / "annotations.csv").string(), s.dataset.annotations);
  std::ofstream gt(out / "ground_truth.csv", std::ios::binary);
  write_embeddings_csv(gt, s.ground_truth, s.dataset.embeddings.ids(), "g");
}

}  // namespace manifold::app
