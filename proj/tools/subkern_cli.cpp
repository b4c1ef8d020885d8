// subkern: synthetic data, graphs, feature maps, Gram matrices,
// classification runs and timing for the submodular ranking kernel.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subkern/classify.hpp"
#include "subkern/datasets.hpp"
#include "subkern/errors.hpp"
#include "subkern/io.hpp"
#include "subkern/isotonic.hpp"
#include "subkern/kernels.hpp"
#include "subkern/submodular.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace subkern;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Options shared by the commands that build a graph.
struct GraphOptions {
  std::string features;
  std::optional<double> lengthscale;
  double keep_fraction = 1.0;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--features", features,
                                "Feature CSV (id,f1,..); defaults to the food table");
    if (required) opt->required();
    opt->check(CLI::ExistingFile);
    app->add_option("--lengthscale", lengthscale,
                    "Kernel lengthscale; median pairwise distance when omitted")
        ->check(CLI::PositiveNumber);
    app->add_option("--keep-fraction", keep_fraction, "Fraction of heaviest edges kept")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  InformationGraph build() const {
    const auto x = features.empty() ? food::feature_matrix() : io::load_features(features);
    return build_graph(x, lengthscale, keep_fraction);
  }
};

// Options selecting how non-exhaustive rankings are averaged.
struct ModeOptions {
  std::string mode = "exact";
  std::size_t samples = 600;
  std::uint64_t budget = kDefaultEnumerationBudget;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Extension averaging: exact or sampled")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    app->add_option("--samples", samples, "Draws per ranking in sampled mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--budget", budget, "Largest extension count enumerated in exact mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  ExtensionMode get(std::uint64_t seed) const {
    if (mode == "sampled") return SampledMode{samples, seed};
    return ExactMode{budget};
  }
};

// Writes config.json: every option of the subcommand with its effective
// value, plus an argument vector that reruns the command.
void write_config(const CLI::App* sub, const fs::path& dir) {
  json options = json::object();
  json argv = json::array({"subkern", sub->get_name()});
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "help") continue;
    std::vector<std::string> values = opt->results();
    const bool given = opt->count() > 0;
    if (!given && !opt->get_default_str().empty()) values = {opt->get_default_str()};
    if (opt->get_type_size() == 0) {
      options[name] = given;
      if (given) argv.push_back("--" + name);
      continue;
    }
    if (values.empty()) {
      options[name] = nullptr;
      continue;
    }
    if (opt->get_expected_max() > 1) {
      options[name] = values;
    } else {
      options[name] = values.front();
    }
    argv.push_back("--" + name);
    for (const auto& v : values) argv.push_back(v);
  }
  json doc;
  doc["subcommand"] = sub->get_name();
  doc["options"] = options;
  doc["argv"] = argv;
  std::ofstream out(dir / "config.json");
  if (!out) throw InputError("cannot write " + (dir / "config.json").string());
  out << doc.dump(2) << "\n";
}

void prepare_output(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<OrderedPartition> load_rankings_for(const std::string& path, int expected_n) {
  auto file = io::load_rankings(path);
  if (expected_n > 0 && file.n != expected_n) {
    throw InputError(path + " ranks " + std::to_string(file.n) + " objects but the graph has " +
                     std::to_string(expected_n));
  }
  return std::move(file.rankings);
}

GramMatrix compute_gram(KernelKind kind, double lambda, const SetFunction* f,
                        const std::vector<OrderedPartition>& rankings,
                        const ExtensionMode& mode, int threads) {
  if (kind == KernelKind::kSubmodular) return gram_submodular(*f, rankings, mode, threads);
  return gram_baseline(kind, lambda, rankings, mode, threads);
}

// ---------------------------------------------------------------- synth

struct SynthCommand {
  std::size_t m = 250;
  double sigma = 0.5;
  std::string kind = "full";
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("synth", "Sample a labelled food-preference dataset");
    sub->add_option("--m", m, "Number of users (split evenly between the two types)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
        ->capture_default_str();
    sub->add_option("--sigma", sigma, "Standard deviation of the score noise")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--kind", kind, "full, topk:K, exh-interleave:L or interleave:L")
        ->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  void run(const CLI::App* sub) const {
    const auto data = generate_dataset(m, sigma, censor_kind_from_string(kind), seed);
    prepare_output(out);
    io::save_rankings(fs::path(out) / "rankings.txt", data.n, data.rankings);
    io::save_labels(fs::path(out) / "labels.csv", data.labels);
    io::save_features(fs::path(out) / "features.csv", food::feature_matrix());
    write_config(sub, out);
    std::cerr << "wrote " << data.size() << " rankings to " << out << "\n";
  }
};

// ---------------------------------------------------------------- graph

struct GraphCommand {
  GraphOptions graph;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("graph", "Build the information graph from object features");
    graph.add(sub, false);
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  void run(const CLI::App* sub) const {
    const auto g = graph.build();
    prepare_output(out);
    io::save_graph(fs::path(out) / "graph.txt", g);
    write_config(sub, out);
    std::cerr << "graph: " << g.size() << " objects, " << g.edges().size()
              << " edges, lengthscale " << io::format_double(g.lengthscale())
              << (g.lengthscale_from_median() ? " (median)" : "") << "\n";
  }
};

// ---------------------------------------------------------------- featmap

struct FeatmapCommand {
  GraphOptions graph;
  ModeOptions mode;
  std::string rankings;
  std::optional<std::size_t> row;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("featmap", "Export feature maps of rankings");
    sub->add_option("--rankings", rankings, "Rankings file")->required()->check(CLI::ExistingFile);
    graph.add(sub, false);
    mode.add(sub);
    sub->add_option("--row", row, "Export only this ranking, as object_id,value rows");
    sub->add_option("--seed", seed, "Seed for sampled mode")->capture_default_str();
    sub->add_option("--threads", threads, "OpenMP threads (0 = all cores)")->capture_default_str();
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  void run(const CLI::App* sub) const {
    const auto g = std::make_shared<const InformationGraph>(graph.build());
    const auto f = SetFunction::cut(g);
    auto data = load_rankings_for(rankings, g->size());
    prepare_output(out);
    if (row) {
      if (*row >= data.size()) {
        throw InputError("--row " + std::to_string(*row) + " but the file has " +
                         std::to_string(data.size()) + " rankings");
      }
      const auto phi = mean_feature_map(f, data[*row], mode.get(derive_seed(seed, *row)));
      io::save_feature_map(fs::path(out) / "feature_map.csv", phi);
    } else {
      io::save_feature_maps(fs::path(out) / "feature_maps.csv",
                            compute_feature_maps(f, data, mode.get(seed), threads));
    }
    write_config(sub, out);
  }
};

// ---------------------------------------------------------------- gram

struct GramCommand {
  GraphOptions graph;
  ModeOptions mode;
  std::string rankings;
  std::string kernel = "submodular";
  double lambda = 1.0;
  std::string format = "csv";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("gram", "Compute a Gram matrix over a rankings file");
    sub->add_option("--rankings", rankings, "Rankings file")->required()->check(CLI::ExistingFile);
    sub->add_option("--kernel", kernel, "submodular, kendall or mallows")
        ->check(CLI::IsMember({"submodular", "kendall", "mallows"}))
        ->capture_default_str();
    sub->add_option("--lambda", lambda, "Mallows bandwidth")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    graph.add(sub, false);
    mode.add(sub);
    sub->add_option("--seed", seed, "Seed for sampled mode")->capture_default_str();
    sub->add_option("--threads", threads, "OpenMP threads (0 = all cores)")->capture_default_str();
    sub->add_option("--format", format, "Matrix format: csv or bin")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  void run(const CLI::App* sub) const {
    const auto kind = kernel_kind_from_string(kernel);
    std::vector<std::pair<std::string, double>> timing;
    GramMatrix k;
    const auto start = Clock::now();
    if (kind == KernelKind::kSubmodular) {
      const auto g = std::make_shared<const InformationGraph>(graph.build());
      const auto f = SetFunction::cut(g);
      const auto data = load_rankings_for(rankings, g->size());
      const auto t0 = Clock::now();
      const auto maps = compute_feature_maps(f, data, mode.get(seed), threads);
      timing.emplace_back("features", seconds_since(t0));
      const auto t1 = Clock::now();
      k = gram_from_feature_maps(maps, threads);
      timing.emplace_back("products", seconds_since(t1));
    } else {
      const auto data = load_rankings_for(rankings, 0);
      const auto t0 = Clock::now();
      k = gram_baseline(kind, lambda, data, mode.get(seed), threads);
      timing.emplace_back("pairs", seconds_since(t0));
    }
    timing.emplace_back("total", seconds_since(start));

    prepare_output(out);
    if (format == "bin") {
      io::save_gram_binary(fs::path(out) / "gram.bin", k);
    } else {
      io::save_gram_csv(fs::path(out) / "gram.csv", k);
    }
    std::ofstream t(fs::path(out) / "timing.csv");
    t << "phase,seconds\n";
    for (const auto& [phase, secs] : timing) t << phase << "," << io::format_double(secs) << "\n";
    write_config(sub, out);
    for (const auto& [phase, secs] : timing) std::cerr << phase << ": " << secs << " s\n";
  }
};

// ---------------------------------------------------------------- classify

struct ClassifyCommand {
  GraphOptions graph;
  ModeOptions mode;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5};
  std::vector<double> sigmas = {0.5};
  std::vector<std::string> kernels = {"submodular", "kendall"};
  std::string kind = "full";
  std::size_t m = 250;
  double lambda = 1.0;
  double reg = kDefaultRegularization;
  double test_fraction = 0.2;
  bool dummy = false;
  std::string rankings;
  std::string labels;
  int threads = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "classify",
        "Kernel ridge classification F1 over seeds and noise levels, on synthetic data "
        "or on --rankings/--labels files");
    sub->add_option("--seeds", seeds, "Seeds; each gives one dataset and one 80/20 split")
        ->expected(1, -1)
        ->capture_default_str();
    sub->add_option("--sigmas", sigmas, "Noise levels for synthetic data")
        ->expected(1, -1)
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--kernels", kernels, "Kernels: submodular, kendall, mallows")
        ->expected(1, -1)
        ->check(CLI::IsMember({"submodular", "kendall", "mallows"}))
        ->capture_default_str();
    sub->add_option("--kind", kind, "Censoring for synthetic data")->capture_default_str();
    sub->add_option("--m", m, "Synthetic dataset size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
        ->capture_default_str();
    sub->add_option("--lambda", lambda, "Mallows bandwidth")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--reg", reg, "Ridge regularization")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--test-fraction", test_fraction, "Share of rows held out")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_flag("--dummy", dummy, "Add rows for a uniform random classifier");
    auto* r = sub->add_option("--rankings", rankings, "Rankings file instead of synthetic data")
                  ->check(CLI::ExistingFile);
    auto* l = sub->add_option("--labels", labels, "Labels CSV for --rankings")
                  ->check(CLI::ExistingFile);
    r->needs(l);
    l->needs(r);
    graph.add(sub, false);
    mode.add(sub);
    sub->add_option("--threads", threads, "OpenMP threads (0 = all cores)")->capture_default_str();
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  void run(const CLI::App* sub) const {
    const auto g = std::make_shared<const InformationGraph>(graph.build());
    const auto f = SetFunction::cut(g);

    struct Job {
      std::string noise;
      std::uint64_t seed;
      LabeledRankingDataset data;
    };
    std::vector<Job> jobs;
    std::string ranking_kind = kind;
    if (!rankings.empty()) {
      auto data = io::load_dataset(rankings, labels);
      if (data.n != g->size()) {
        throw InputError(rankings + " ranks " + std::to_string(data.n) +
                         " objects but the graph has " + std::to_string(g->size()));
      }
      ranking_kind = "file";
      for (auto seed : seeds) jobs.push_back({"NA", seed, data});
    } else {
      const auto censor_kind = censor_kind_from_string(kind);
      for (double sigma : sigmas) {
        for (auto seed : seeds) {
          jobs.push_back({io::format_double(sigma), seed, generate_dataset(m, sigma, censor_kind, seed)});
        }
      }
    }

    prepare_output(out);
    std::ofstream metrics(fs::path(out) / "metrics.csv");
    if (!metrics) throw InputError("cannot write " + (fs::path(out) / "metrics.csv").string());
    metrics << "seed,kernel,ranking_kind,noise,f1\n";
    for (const auto& job : jobs) {
      const auto s = split(job.data.labels, test_fraction, job.seed);
      for (const auto& name : kernels) {
        const auto k = compute_gram(kernel_kind_from_string(name), lambda, &f, job.data.rankings,
                                    mode.get(job.seed), threads);
        const double f1 = evaluate_split(k, job.data.labels, s, reg);
        metrics << job.seed << "," << name << "," << ranking_kind << "," << job.noise << ","
                << io::format_double(f1) << "\n";
      }
      if (dummy) {
        std::vector<int> y_test;
        for (std::size_t i : s.test) y_test.push_back(job.data.labels[i]);
        const double f1 = f1_score(dummy_predict(y_test.size(), job.seed), y_test);
        metrics << job.seed << ",dummy," << ranking_kind << "," << job.noise << ","
                << io::format_double(f1) << "\n";
      }
    }
    write_config(sub, out);
  }
};

// ---------------------------------------------------------------- bench

struct BenchCommand {
  GraphOptions graph;
  ModeOptions mode;
  std::vector<std::size_t> grid = {500, 1000, 2000};
  std::vector<std::string> kernels = {"submodular", "kendall"};
  std::string kind = "full";
  double sigma = 1.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  int repeats = 7;
  double timeout = 60.0;
  int threads = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("bench", "Time Gram computation over a sample-size grid");
    sub->add_option("--grid", grid, "Dataset sizes")->expected(1, -1)->capture_default_str();
    sub->add_option("--kernels", kernels, "Kernels: submodular, kendall, mallows")
        ->expected(1, -1)
        ->check(CLI::IsMember({"submodular", "kendall", "mallows"}))
        ->capture_default_str();
    sub->add_option("--kind", kind, "Censoring of the synthetic rankings")->capture_default_str();
    sub->add_option("--sigma", sigma, "Noise level of the synthetic rankings")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--lambda", lambda, "Mallows bandwidth")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--repeats", repeats, "Timed runs per cell; the median is reported")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--timeout", timeout,
                    "Seconds; a kernel whose warm-up run exceeds this reports NA from then on")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    graph.add(sub, false);
    mode.add(sub);
    sub->add_option("--threads", threads, "OpenMP threads (0 = all cores)")->capture_default_str();
    sub->add_option("--out", out, "Output directory")->required();
    sub->callback([this, sub] { run(sub); });
  }

  static double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  }

  void run(const CLI::App* sub) const {
    const auto g = std::make_shared<const InformationGraph>(graph.build());
    const auto f = SetFunction::cut(g);
    const std::size_t largest = *std::max_element(grid.begin(), grid.end());
    const auto data = generate_dataset(std::max<std::size_t>(largest, 2), sigma,
                                       censor_kind_from_string(kind), seed);
    const auto ext = mode.get(seed);

    prepare_output(out);
    std::ofstream csv(fs::path(out) / "bench.csv");
    if (!csv) throw InputError("cannot write " + (fs::path(out) / "bench.csv").string());
    csv << "m,kernel,phase,median_seconds\n";

    for (const auto& name : kernels) {
      const auto kernel = kernel_kind_from_string(name);
      bool timed_out = false;
      for (std::size_t m : grid) {
        const std::vector<std::string> phases =
            kernel == KernelKind::kSubmodular
                ? std::vector<std::string>{"features", "products", "total"}
                : std::vector<std::string>{"total"};
        const auto emit_na = [&] {
          for (const auto& p : phases) csv << m << "," << name << "," << p << ",NA\n";
        };
        if (timed_out || m > data.size()) {
          emit_na();
          continue;
        }
        const std::vector<OrderedPartition> subset(data.rankings.begin(),
                                                   data.rankings.begin() + static_cast<std::ptrdiff_t>(m));
        // One run: per-phase seconds, in the order of `phases`.
        const auto once = [&] {
          std::vector<double> secs;
          if (kernel == KernelKind::kSubmodular) {
            const auto t0 = Clock::now();
            const auto maps = compute_feature_maps(f, subset, ext, threads);
            secs.push_back(seconds_since(t0));
            const auto t1 = Clock::now();
            gram_from_feature_maps(maps, threads);
            secs.push_back(seconds_since(t1));
            secs.push_back(secs[0] + secs[1]);
          } else {
            const auto t0 = Clock::now();
            gram_baseline(kernel, lambda, subset, ext, threads);
            secs.push_back(seconds_since(t0));
          }
          return secs;
        };
        const auto warm = once();
        if (warm.back() > timeout) {
          timed_out = true;
          emit_na();
          std::cerr << name << " m=" << m << ": warm-up took " << warm.back()
                    << " s, over the timeout\n";
          continue;
        }
        std::vector<std::vector<double>> runs(phases.size());
        for (int r = 0; r < repeats; ++r) {
          const auto secs = once();
          for (std::size_t p = 0; p < phases.size(); ++p) runs[p].push_back(secs[p]);
        }
        for (std::size_t p = 0; p < phases.size(); ++p) {
          csv << m << "," << name << "," << phases[p] << "," << io::format_double(median(runs[p]))
              << "\n";
        }
        csv.flush();
        std::cerr << name << " m=" << m << ": " << median(runs.back()) << " s\n";
      }
    }
    write_config(sub, out);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Submodular kernels for ranked data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "subkern 1.0");

  SynthCommand synth;
  GraphCommand graph;
  FeatmapCommand featmap;
  GramCommand gram;
  ClassifyCommand classify;
  BenchCommand bench;
  synth.add(app);
  graph.add(app);
  featmap.add(app);
  gram.add(app);
  classify.add(app);
  bench.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
