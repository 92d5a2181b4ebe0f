#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ibts/cli.hpp"

namespace {

std::vector<uint64_t> resolve_seeds(const ibts::ExperimentConfig& cfg, const CLI::App* sub,
                                    uint64_t seed_flag) {
  std::vector<uint64_t> seeds = cfg.seeds;
  if (const char* env = std::getenv("IBTS_SEED")) {
    size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(env, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || env[pos] != '\0') {
      throw ibts::UsageError(std::string("IBTS_SEED must be a non-negative integer, got '") +
                             env + "'");
    }
    seeds = {static_cast<uint64_t>(v)};
  }
  if (sub->count("--seed") > 0) seeds = {seed_flag};
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Trains and evaluates information-bottleneck saliency explanations for "
      "time-series classifiers."};
  app.require_subcommand(1);

  std::string config_path, out_dir, kind;
  uint64_t seed_flag = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--seed", seed_flag, "run a single seed instead of the config's seed list");
    sub->add_option("--out", out_dir, "override the config output dir");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset directory");
  add_common(gen);
  gen->add_option("--kind", kind,
                  "dataset family: freqshapes, seqcomb-uv, seqcomb-mv, lowvar, signaling");

  CLI::App* train_clf = app.add_subcommand("train-classifier", "train the prediction model");
  add_common(train_clf);
  CLI::App* train_exp =
      app.add_subcommand("train-explainer", "train the mask extractor and conditioner");
  add_common(train_exp);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score explanations and run faithfulness probes");
  add_common(evaluate);
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "distribution-shift table for explanation families");
  add_common(diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ibts::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ibts::load_experiment_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (gen->parsed()) {
      if (config_path.empty() && kind.empty()) {
        throw ibts::UsageError("gen-data: provide --kind or --config");
      }
      if (!kind.empty()) {
        cfg.dataset.from_dir = false;
        try {
          cfg.dataset.gen.kind = ibts::dataset_kind_from_string(kind);
        } catch (const std::invalid_argument& e) {
          throw ibts::UsageError(e.what());
        }
      }
      const std::vector<uint64_t> seeds = resolve_seeds(cfg, gen, seed_flag);
      if (gen->count("--seed") > 0 || std::getenv("IBTS_SEED") != nullptr) {
        cfg.dataset.gen.seed = seeds.front();
      }
      const std::string target = !out_dir.empty() ? out_dir : cfg.output_dir + "/dataset";
      ibts::cmd_gen_data(cfg, target);
      return 0;
    }

    if (config_path.empty()) {
      throw ibts::UsageError(app.get_subcommands().front()->get_name() +
                             ": --config is required");
    }
    if (train_clf->parsed()) {
      ibts::cmd_train_classifier(cfg, resolve_seeds(cfg, train_clf, seed_flag));
    } else if (train_exp->parsed()) {
      ibts::cmd_train_explainer(cfg, resolve_seeds(cfg, train_exp, seed_flag));
    } else if (evaluate->parsed()) {
      ibts::cmd_evaluate(cfg, resolve_seeds(cfg, evaluate, seed_flag));
    } else if (diagnose->parsed()) {
      ibts::cmd_diagnose(cfg, resolve_seeds(cfg, diagnose, seed_flag));
    }
    return 0;
  } catch (const ibts::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
