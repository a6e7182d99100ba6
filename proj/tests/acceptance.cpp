// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Thresholds are fixed here and not tuned per run.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "manifold/app/commands.hpp"
#include "support/helpers.hpp"

using namespace manifold;
using testing_support::to_matrix;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures with a short reason; the first few are reported.
struct Check {
  Outcome& o;
  int reported = 0;
  void operator()(bool ok, const std::string& what) {
    if (ok) return;
    o.pass = false;
    if (reported++ < 3) o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

AffinityMatrix random_connected(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto link = [&](std::size_t i, std::size_t j) {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    W(a, b) = W(b, a) = rng.uniform(0.05, 1.0);
  };
  for (std::size_t i = 1; i < n; ++i) link(i, rng.below(i));  // random spanning tree
  for (std::size_t e = 0; e < 2 * n; ++e) {
    const auto i = rng.below(n), j = rng.below(n);
    if (i != j) link(i, j);
  }
  return {W, true, DiagonalConvention::Zero};
}

// 1 ----------------------------------------------------------------------
Outcome ac1() {
  Outcome o;
  Check check{o};
  const auto start = std::chrono::steady_clock::now();
  const auto t = load_annotations(std::string(MANIFOLD_SOURCE_DIR) + "/data/annotations.csv");
  const auto h = t.histogram("period");
  const std::map<std::string, std::size_t> expected = {{"Medieval", 721},   {"Early Renaissance", 448},
                                                       {"Northern Renaissance", 385}, {"Baroque", 724},
                                                       {"Romanticism", 302}, {"Impressionism", 618}};
  check(t.size() == 3198, "rows=" + std::to_string(t.size()));
  check(h == expected, "period histogram differs");
  const auto m = merge_categories(t, "period",
                                  {{"Early Renaissance", "Renaissance"}, {"Northern Renaissance", "Renaissance"}});
  const auto mh = m.histogram("period");
  check(mh.size() == 5, "merged periods=" + std::to_string(mh.size()));
  check(mh.count("Renaissance") && mh.at("Renaissance") == 833, "Renaissance count");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check(secs < 1.0, "runtime " + fmt(secs) + "s");
  if (o.pass) o.detail = "rows=3198 periods=6 merged=5 Renaissance=833 " + fmt(secs) + "s";
  return o;
}

// 2 ----------------------------------------------------------------------
Outcome ac2() {
  Outcome o;
  Check check{o};
  double worst_d = 0, worst_g = 0, worst_lle = 0, worst_t = 0;
  int knn_mismatch = 0;
  const int instances = 30;
  for (int s = 0; s < instances; ++s) {
    const auto seed = static_cast<unsigned>(4000 + s);
    const std::size_t n = 20 + static_cast<std::size_t>(s) % 41;  // 20..60
    const std::size_t k = 4 + static_cast<std::size_t>(s) % 4;
    const auto pts = oracle::random_points(n, 3 + static_cast<std::size_t>(s) % 3, seed);
    const Matrix X = to_matrix(pts);

    const auto ref = oracle::distances(pts);
    const auto D = pairwise_distances(X);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) worst_d = std::max(worst_d, std::abs(D(i, j) - ref[i][j]));

    const auto ref_knn = oracle::knn(ref, k);
    const auto knn = knn_graph(D, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < k; ++a) knn_mismatch += knn.neighbors(i)[a].index != ref_knn[i][a];

    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : ref_knn[i]) edges.emplace_back(i, j, ref[i][j]);
    const auto fw = oracle::floyd_warshall(n, edges);
    bool connected = true;
    for (std::size_t j = 0; j < n; ++j) connected = connected && std::isfinite(fw[0][j]);
    if (connected) {
      const auto G = geodesic_distances(knn);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) worst_g = std::max(worst_g, std::abs(G(i, j) - fw[i][j]));
    } else {
      check(false, "instance " + std::to_string(s) + " disconnected");
    }

    // LLE: compare the per-point reconstruction objective at each solution.
    const auto W = lle_weights(X, knn, 1e-3).weights;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> nbrs;
      for (const auto& nb : knn.neighbors(i)) nbrs.push_back(nb.index);
      const auto w = oracle::lle_weights(pts, i, nbrs, 1e-3);
      std::vector<double> r_lib(pts[i]), r_ref(pts[i]);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t d = 0; d < pts[i].size(); ++d) {
          r_lib[d] -= W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nbrs[a])) * pts[nbrs[a]][d];
          r_ref[d] -= w[a] * pts[nbrs[a]][d];
        }
      double e_lib = 0, e_ref = 0;
      for (std::size_t d = 0; d < r_lib.size(); ++d) {
        e_lib += r_lib[d] * r_lib[d];
        e_ref += r_ref[d] * r_ref[d];
      }
      worst_lle = std::max(worst_lle, std::abs(e_lib - e_ref));
    }

    const auto Y = oracle::random_points(n, 2, seed + 1);
    const std::size_t tk = std::min<std::size_t>(k, (n - 1) / 2);
    worst_t = std::max(worst_t, std::abs(trustworthiness(X, to_matrix(Y), tk) - oracle::trustworthiness(pts, Y, tk)));
  }
  check(worst_d <= 1e-12, "distance err " + fmt(worst_d));
  check(knn_mismatch == 0, "knn mismatches " + std::to_string(knn_mismatch));
  check(worst_g <= 1e-12, "geodesic err " + fmt(worst_g));
  check(worst_lle <= 1e-8, "lle objective err " + fmt(worst_lle));
  check(worst_t <= 1e-12, "trustworthiness err " + fmt(worst_t));
  if (o.pass)
    o.detail = "instances=" + std::to_string(instances) + " dist=" + fmt(worst_d) + " geo=" + fmt(worst_g) +
               " lle=" + fmt(worst_lle) + " trust=" + fmt(worst_t);
  return o;
}

// 3 ----------------------------------------------------------------------
Outcome ac3() {
  Outcome o;
  Check check{o};
  double worst_res = 0, worst_triv = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t n = 20 + 20 * s;  // 20..200
    const auto A = random_connected(n, 50 + s);
    const auto spec = laplacian_spectrum(A, 3);
    const Vector deg = A.weights.rowwise().sum();
    Matrix L = -A.weights;
    L.diagonal() += deg;
    for (Eigen::Index c = 0; c < 3; ++c) {
      const Eigen::VectorXd y = spec.vectors.col(c);
      worst_res = std::max(worst_res, (L * y - spec.values[c] * deg.cwiseProduct(y)).cwiseAbs().maxCoeff());
      check(spec.values[c] > 1e-10, "trivial eigenvalue not excluded");
    }
    worst_triv = std::max(worst_triv, std::abs(spec.trivial_value));
  }
  check(worst_res <= 1e-8, "residual " + fmt(worst_res));
  check(worst_triv <= 1e-10, "trivial eigenvalue " + fmt(worst_triv));
  if (o.pass) o.detail = "graphs=10 n<=200 residual=" + fmt(worst_res) + " trivial=" + fmt(worst_triv);
  return o;
}

// 4 ----------------------------------------------------------------------
Outcome ac4() {
  Outcome o;
  Check check{o};
  double worst = 0;
  for (std::size_t n = 10; n <= 100; n += 10) {
    const Matrix X = to_matrix(oracle::random_points(n, 2, static_cast<unsigned>(n), 5.0));
    worst = std::max(worst, procrustes_error(X, classical_mds(pairwise_distances(X), 2).coords));
  }
  check(worst <= 1e-8, "procrustes " + fmt(worst));
  if (o.pass) o.detail = "n=10..100 procrustes=" + fmt(worst);
  return o;
}

// 5 ----------------------------------------------------------------------
Outcome ac5() {
  Outcome o;
  Check check{o};
  double worst_rise = 0, worst_norm = 0;
  auto monotone = [&](const std::vector<double>& s) {
    for (std::size_t i = 1; i < s.size(); ++i) worst_rise = std::max(worst_rise, s[i] - s[i - 1]);
  };
  // Synthetic fixtures (not realizable in 2-D in general).
  for (auto g : {fixtures::Generator::SwissRoll, fixtures::Generator::GaussianClusters, fixtures::Generator::Line1d,
                 fixtures::Generator::Trajectory}) {
    const auto fx = fixtures::generate({g, 80, 0.0, 7});
    const Matrix D = pairwise_distances(fx.dataset.embeddings).values();
    monotone(smacof_mds(D, 2, {300, 1e-9, 7}).stress);
  }
  // Realizable planar instances from a random start.
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix X = to_matrix(oracle::random_points(10 + 5 * s, 2, static_cast<unsigned>(600 + s)));
    const Matrix D = pairwise_distances(X).values();
    const auto r = smacof_mds(D, 2, {500, 0.0, s});
    monotone(r.stress);
    worst_norm = std::max(worst_norm, r.normalized_stress(D));
  }
  check(worst_rise <= 1e-12, "stress increased by " + fmt(worst_rise));
  check(worst_norm <= 1e-6, "normalized stress " + fmt(worst_norm));
  if (o.pass) o.detail = "max rise=" + fmt(worst_rise) + " realizable normalized stress<=" + fmt(worst_norm);
  return o;
}

// 6 ----------------------------------------------------------------------
Outcome ac6() {
  Outcome o;
  Check check{o};
  setenv("MANIFOLD_THREADS", "1", 1);
  const auto start = std::chrono::steady_clock::now();
  const auto fx = fixtures::generate({fixtures::Generator::SwissRoll, 1000, 0.0, 7});
  const auto e = isomap(fx.dataset.embeddings.values(), 10, 2);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  unsetenv("MANIFOLD_THREADS");
  const double t = trustworthiness(fx.ground_truth, e.coords, 12);
  check(t >= 0.95, "trustworthiness " + fmt(t));
  check(secs < 30.0, "runtime " + fmt(secs) + "s");
  if (o.pass) o.detail = "trustworthiness(k=12)=" + fmt(t) + " single-thread " + fmt(secs) + "s";
  return o;
}

// 7 ----------------------------------------------------------------------
Outcome ac7() {
  Outcome o;
  Check check{o};
  double worst_perp = 0, worst_grad = 0;
  for (unsigned s = 0; s < 5; ++s) {
    const auto D = pairwise_distances(to_matrix(oracle::random_points(100, 5, 70 + s)));
    const auto cal = calibrate_perplexity(D, 30.0);
    for (std::size_t i = 0; i < D.n(); ++i)
      worst_perp = std::max(worst_perp, std::abs(std::exp2(conditional_entropy(D, cal, i)) - 30.0));
  }
  for (unsigned s = 0; s < 5; ++s) {
    const std::size_t n = 6 + s;  // <= 10
    const auto cal = calibrate_perplexity(pairwise_distances(to_matrix(oracle::random_points(n, 4, 90 + s))), 3.0);
    const Matrix Y = to_matrix(oracle::random_points(n, 2, 95 + s));
    const Matrix g = tsne_gradient(cal.P, Y);
    Matrix fd(g.rows(), g.cols());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
      for (Eigen::Index j = 0; j < Y.cols(); ++j) {
        Matrix a = Y, b = Y;
        a(i, j) += h;
        b(i, j) -= h;
        fd(i, j) = (tsne_kl(cal.P, a) - tsne_kl(cal.P, b)) / (2 * h);
      }
    worst_grad = std::max(worst_grad, (fd - g).norm() / g.norm());
  }
  const auto start = std::chrono::steady_clock::now();
  const auto fx = fixtures::generate({fixtures::Generator::GaussianClusters, 300, 0.0, 7});
  TsneConfig cfg;
  cfg.seed = 7;
  const auto r = tsne_embed(calibrate_perplexity(pairwise_distances(fx.dataset.embeddings), cfg.perplexity), cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double agree = knn_label_agreement(r.embedding.coords, fx.dataset.labels(), 10);
  const double kl_ex = r.kl[r.exaggeration_end], kl_final = r.kl.back();
  check(worst_perp <= 1e-3, "perplexity err " + fmt(worst_perp));
  check(worst_grad <= 1e-5, "gradient rel err " + fmt(worst_grad));
  check(kl_final < kl_ex, "KL final " + fmt(kl_final) + " >= " + fmt(kl_ex));
  check(agree >= 0.9, "knn agreement " + fmt(agree));
  check(secs < 60.0, "runtime " + fmt(secs) + "s");
  if (o.pass)
    o.detail = "perp err=" + fmt(worst_perp) + " grad rel=" + fmt(worst_grad) + " KL " + fmt(kl_ex) + "->" +
               fmt(kl_final) + " agreement=" + fmt(agree) + " " + fmt(secs) + "s";
  return o;
}

// 8 ----------------------------------------------------------------------
double principal_axis_rank_correlation(const Matrix& Y, const Matrix& truth) {
  Eigen::MatrixXd C = Y.rowwise() - Y.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinV);
  const Eigen::VectorXd proj = C * svd.matrixV().col(0);
  std::vector<double> a(proj.data(), proj.data() + proj.size());
  return oracle::spearman(testing_support::column(truth, 0), a);
}

Outcome ac8() {
  Outcome o;
  Check check{o};
  const auto start = std::chrono::steady_clock::now();
  const auto clusters = fixtures::generate({fixtures::Generator::GaussianClusters, 300, 0.0, 7});
  // At the default k=5 the diffusion reaches about 50 samples at the chosen t;
  // longer trajectories curl into a loop once far potentials saturate.
  const auto traj = fixtures::generate({fixtures::Generator::Trajectory, 50, 0.0, 7});

  double worst_row = 0, worst_rise = 0;
  for (const auto* fx : {&clusters, &traj}) {
    const auto D = pairwise_distances(fx->dataset.embeddings);
    const auto op = diffusion_operator(alpha_decay_kernel(D, knn_graph(D, 5), 40.0));
    const auto H = von_neumann_entropy(op.spectrum(), 100);
    for (std::size_t t = 1; t < H.size(); ++t) worst_rise = std::max(worst_rise, H[t] - H[t - 1]);
    const std::size_t t_sel = find_knee(H);
    for (std::size_t t = 1; t <= std::max<std::size_t>(t_sel, 10); ++t)
      worst_row = std::max(worst_row, (op.power(t).rowwise().sum().array() - 1.0).abs().maxCoeff());
  }
  PhateOptions opt;
  opt.seed = 7;
  const auto rc = phate_embed(clusters.dataset.embeddings.values(), opt);
  const double sil = silhouette(rc.embedding.coords, clusters.dataset.labels());
  const auto rt = phate_embed(traj.dataset.embeddings.values(), opt);
  const double rho = principal_axis_rank_correlation(rt.embedding.coords, traj.ground_truth);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  check(worst_row <= 1e-12, "row sum err " + fmt(worst_row));
  check(worst_rise <= 1e-12, "entropy rose by " + fmt(worst_rise));
  check(sil >= 0.5, "silhouette " + fmt(sil));
  check(std::abs(rho) >= 0.99, "rank correlation " + fmt(rho));
  check(secs < 60.0, "runtime " + fmt(secs) + "s");
  if (o.pass)
    o.detail = "row err=" + fmt(worst_row) + " silhouette=" + fmt(sil) + " (t=" + std::to_string(rc.t) +
               ") |rho|=" + fmt(std::abs(rho)) + " (t=" + std::to_string(rt.t) + ") " + fmt(secs) + "s";
  return o;
}

// 9 ----------------------------------------------------------------------
Outcome ac9() {
  Outcome o;
  Check check{o};
  const auto dir = testing_support::scratch_dir("acceptance_det");
  app::write_fixture({fixtures::Generator::GaussianClusters, 150, 0.0, 7}, dir / "fx");
  const auto in = dir / "fx" / "embeddings.csv";
  const auto ann = dir / "fx" / "annotations.csv";
  const std::string cli = std::string("\"") + MANIFOLD_CLI + "\"";
  for (const auto& algo : app::algorithm_names()) {
    std::vector<std::string> csvs, svgs;
    // 50 points per cluster: graph methods need k >= 50 for a connected graph.
    const std::string extra = algo == "isomap" || algo == "laplacian_eigenmaps" ? " --k 60" : "";
    for (const char* threads : {"1", "1", "4"}) {
      const auto out = dir / (algo + "_" + std::to_string(csvs.size()));
      const std::string env = std::string("MANIFOLD_THREADS=") + threads + " ";
      const int e1 = run(env + cli + " embed --algo " + algo + " --input " + q(in) + " --annotations " + q(ann) +
                         " --out " + q(out) + " --seed 7" + extra + " >/dev/null 2>&1");
      const auto csv_path = out / (algo + ".csv");
      const int e2 = run(env + cli + " plot --embedding " + q(csv_path) + " --annotations " + q(ann) +
                         " --color-by label --out " + q(out / (algo + ".svg")) + " >/dev/null 2>&1");
      check(e1 == 0 && e2 == 0, algo + " exit " + std::to_string(e1) + "/" + std::to_string(e2));
      if (e1 != 0 || e2 != 0) break;
      csvs.push_back(csv::read_file(csv_path.string()));
      svgs.push_back(csv::read_file((out / (algo + ".svg")).string()));
    }
    if (csvs.size() != 3) continue;
    check(csvs[0] == csvs[1] && svgs[0] == svgs[1], algo + " differs between runs");
    check(csvs[0] == csvs[2] && svgs[0] == svgs[2], algo + " differs between 1 and 4 threads");
  }
  if (o.pass) o.detail = "algorithms=7 CSV+SVG byte-identical (2 runs, 1 vs 4 threads)";
  return o;
}

// 10 ---------------------------------------------------------------------
Outcome ac10() {
  Outcome o;
  Check check{o};
  const auto dir = testing_support::scratch_dir("acceptance_pipeline");
  app::write_fixture({fixtures::Generator::GaussianClusters, 300, 0.0, 7}, dir / "fx");
  testing_support::write_file(dir / "pipeline.toml",
                              "seed = 7\n"
                              "input = \"fx/embeddings.csv\"\n"
                              "annotations = \"fx/annotations.csv\"\n"
                              "label = \"label\"\n"
                              "out = \"out\"\n"
                              "eval_k = 10\n"
                              "\n"
                              "# 100 points per cluster: the neighbor graph is connected only for k >= 100.\n"
                              "[params.laplacian_eigenmaps]\n"
                              "k = 100\n"
                              "[params.isomap]\n"
                              "k = 100\n");
  const auto start = std::chrono::steady_clock::now();
  const int code = run(std::string("\"") + MANIFOLD_CLI + "\" pipeline --config " + q(dir / "pipeline.toml") +
                       " >/dev/null 2>&1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check(code == 0, "exit " + std::to_string(code));
  std::size_t emb = 0, rep = 0, svg = 0;
  for (const auto& a : app::algorithm_names()) {
    emb += fs::exists(dir / "out" / (a + ".csv"));
    rep += fs::exists(dir / "out" / (a + ".quality.json"));
    svg += fs::exists(dir / "out" / (a + ".svg"));
  }
  const bool summary = fs::exists(dir / "out" / "summary.txt") && fs::exists(dir / "out" / "summary.json");
  check(emb == 7 && rep == 7 && svg == 7, "artifacts " + std::to_string(emb) + "/" + std::to_string(rep) + "/" +
                                              std::to_string(svg));
  check(summary, "summary missing");
  check(secs < 300.0, "runtime " + fmt(secs) + "s");
  if (o.pass) o.detail = "7 embeddings, 7 reports, 7 SVGs, summary; exit 0 in " + fmt(secs) + "s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 dataset fixture", ac1},       {"AC2 oracle equivalence", ac2}, {"AC3 spectral residuals", ac3},
      {"AC4 classical MDS recovery", ac4}, {"AC5 SMACOF", ac5},             {"AC6 ISOMAP swiss roll", ac6},
      {"AC7 t-SNE", ac7},                 {"AC8 PHATE", ac8},              {"AC9 determinism", ac9},
      {"AC10 end-to-end pipeline", ac10}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("[%s] %-28s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
