// manifold: compute, score and plot 2-D embeddings of feature matrices.
//
// Exit codes: 0 success, 1 configuration error, 2 input error,
// 3 numerical failure. Failures print one line "<Kind> <detail>" to stderr.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "manifold/app/commands.hpp"

namespace {

using namespace manifold;

int fail(const Error& e) {
  std::cerr << kind_name(e.kind()) << ' ' << e.detail() << '\n';
  if (e.kind() == ErrorKind::DisconnectedGraph)
    std::cerr << "hint: the neighbor graph is disconnected; raise --k until it forms a single component\n";
  return exit_code_for(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear dimensionality reduction: embed, evaluate, plot, pipeline, fixtures"};
  app.require_subcommand(1);

  app::RunConfig rc;
  std::optional<std::size_t> k, t, iters, t_max;
  std::optional<double> sigma, perplexity, alpha, eps, reg;
  auto* embed = app.add_subcommand("embed", "Compute an embedding and its manifest");
  embed->add_option("--algo", rc.algorithm, "laplacian_eigenmaps|lle|isomap|classical_mds|smacof|tsne|phate")
      ->required();
  embed->add_option("--input", rc.input, "Feature matrix (.csv or .bin)")->required();
  embed->add_option("--annotations", rc.annotations, "Annotation CSV; restricts the run to annotated ids");
  embed->add_option("--label", rc.label, "Label column used when joining annotations");
  embed->add_option("--out", rc.out, "Output directory")->required();
  embed->add_option("--seed", rc.seed, "Random seed")->required();
  embed->add_option("--k", k, "Neighbors");
  embed->add_option("--sigma", sigma, "Gaussian kernel width (laplacian_eigenmaps)");
  embed->add_option("--perplexity", perplexity, "t-SNE perplexity");
  embed->add_option("--alpha", alpha, "PHATE kernel decay");
  embed->add_option("--t", t, "PHATE diffusion time (automatic if omitted)");
  embed->add_option("--t-max", t_max, "PHATE largest diffusion time scanned");
  embed->add_option("--dim", rc.dim, "Output dimension");
  embed->add_option("--iters", iters, "Iteration budget (smacof, tsne, phate)");
  embed->add_option("--eps", eps, "SMACOF relative stress tolerance");
  embed->add_option("--reg", reg, "LLE regularization");
  embed->add_option("--metric", rc.metric, "euclidean|cosine");
  embed->add_flag("--trace", rc.trace, "Write loss / entropy traces as CSV");

  app::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score an embedding");
  evaluate->add_option("--embedding", ev.embedding, "Embedding CSV")->required();
  evaluate->add_option("--input", ev.input, "Original feature matrix")->required();
  evaluate->add_option("--annotations", ev.annotations, "Annotation CSV")->required();
  evaluate->add_option("--label", ev.label, "Label column")->required();
  evaluate->add_option("--k", ev.k, "Neighborhood size");
  evaluate->add_option("--out", ev.out_prefix, "Output prefix for .json/.txt");

  app::PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Render an SVG scatter plot");
  plot->add_option("--embedding", pa.embedding, "Embedding CSV")->required();
  plot->add_option("--annotations", pa.annotations, "Annotation CSV")->required();
  plot->add_option("--color-by", pa.spec.color_by, "Annotation column used for colors")->required();
  plot->add_option("--out", pa.out, "SVG file")->required();
  plot->add_option("--width", pa.spec.width, "Width in px");
  plot->add_option("--height", pa.spec.height, "Height in px");
  plot->add_option("--radius", pa.spec.radius, "Point radius in px");
  bool no_legend = false;
  plot->add_flag("--no-legend", no_legend, "Omit the legend");

  std::string config;
  auto* pipeline = app.add_subcommand("pipeline", "Run merge, embed, evaluate and plot from a config file");
  pipeline->add_option("--config", config, "TOML or JSON config")->required();

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Synthetic datasets");
  fixtures_cmd->require_subcommand(1);
  std::string gen_name;
  fixtures::SyntheticSpec spec;
  std::string fixture_out;
  auto* generate = fixtures_cmd->add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--spec", gen_name, "swiss_roll|gaussian_clusters|line_1d|trajectory")->required();
  generate->add_option("--n", spec.n, "Sample count")->required();
  generate->add_option("--seed", spec.seed, "Random seed")->required();
  generate->add_option("--noise", spec.noise, "Gaussian noise standard deviation");
  generate->add_option("--out", fixture_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ConfigError " << e.what() << '\n';
    return 1;
  }

  try {
    if (*embed) {
      rc.k = k;
      rc.t = t;
      rc.t_max = t_max;
      rc.iters = iters;
      rc.sigma = sigma;
      rc.perplexity = perplexity;
      rc.alpha = alpha;
      rc.eps = eps;
      rc.reg = reg;
      auto o = app::run_embed(rc);
      std::cout << o.embedding.string() << '\n' << o.manifest.string() << '\n';
    } else if (*evaluate) {
      auto o = app::run_evaluate(ev);
      std::cout << to_text(o.report);
    } else if (*plot) {
      pa.spec.legend = !no_legend;
      app::run_plot(pa);
      std::cout << pa.out << '\n';
    } else if (*pipeline) {
      auto o = app::run_pipeline(config, &std::cerr);
      std::cout << csv::read_file(o.summary_text.string());
    } else if (*generate) {
      spec.generator = fixtures::generator_from_name(gen_name);
      app::write_fixture(spec, fixture_out);
      std::cout << fixture_out << '\n';
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "IoError " << e.what() << '\n';
    return 2;
  }
  return 0;
}
