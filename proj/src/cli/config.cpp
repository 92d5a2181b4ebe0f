#include <algorithm>
#include <set>
#include <string>

#include "ibts/cli.hpp"
#include "ibts/io.hpp"
#include "json.hpp"

namespace ibts {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError("config: " + where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw UsageError("config: unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

DatasetSpec parse_dataset(const json& j) {
  DatasetSpec spec;
  if (j.contains("dir")) {
    check_keys(j, {"dir"}, "dataset");
    spec.from_dir = true;
    spec.dir = j.at("dir").get<std::string>();
    if (spec.dir.empty()) throw UsageError("config: dataset.dir must not be empty");
    return spec;
  }
  check_keys(j,
             {"kind", "n_train", "n_val", "n_test", "seed", "narma_order", "amplitude",
              "period_short", "period_long", "window_len", "segment_len", "var_scale",
              "mean_offset", "signal_T", "signal_index"},
             "dataset");
  if (!j.contains("kind")) throw UsageError("config: dataset block needs 'kind' or 'dir'");
  GeneratorConfig& g = spec.gen;
  try {
    g.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  g.n_train = get_or<int64_t>(j, "n_train", g.n_train);
  g.n_val = get_or<int64_t>(j, "n_val", g.n_val);
  g.n_test = get_or<int64_t>(j, "n_test", g.n_test);
  g.seed = get_or<uint64_t>(j, "seed", g.seed);
  g.narma_order = get_or<int>(j, "narma_order", g.narma_order);
  g.amplitude = get_or<double>(j, "amplitude", g.amplitude);
  g.period_short = get_or<int>(j, "period_short", g.period_short);
  g.period_long = get_or<int>(j, "period_long", g.period_long);
  g.window_len = get_or<int>(j, "window_len", g.window_len);
  g.segment_len = get_or<int>(j, "segment_len", g.segment_len);
  g.var_scale = get_or<double>(j, "var_scale", g.var_scale);
  g.mean_offset = get_or<double>(j, "mean_offset", g.mean_offset);
  g.signal_T = get_or<int64_t>(j, "signal_T", g.signal_T);
  g.signal_index = get_or<int64_t>(j, "signal_index", g.signal_index);
  try {
    validate(g);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return spec;
}

ClassifierSpec parse_classifier(const json& j) {
  ClassifierSpec spec;
  if (j.contains("dir")) {
    check_keys(j, {"dir"}, "classifier");
    spec.from_dir = true;
    spec.dir = j.at("dir").get<std::string>();
    if (spec.dir.empty()) throw UsageError("config: classifier.dir must not be empty");
    return spec;
  }
  check_keys(j, {"encoder", "d_hidden", "dropout", "lr", "weight_decay", "epochs", "batch_size",
                 "seed"},
             "classifier");
  ClassifierConfig& c = spec.cfg;
  try {
    if (j.contains("encoder")) c.encoder = encoder_kind_from_string(j.at("encoder"));
    c.d_hidden = get_or<int64_t>(j, "d_hidden", c.d_hidden);
    c.dropout = get_or<double>(j, "dropout", c.dropout);
    c.lr = get_or<double>(j, "lr", c.lr);
    c.weight_decay = get_or<double>(j, "weight_decay", c.weight_decay);
    c.epochs = get_or<int64_t>(j, "epochs", c.epochs);
    c.batch_size = get_or<int64_t>(j, "batch_size", c.batch_size);
    c.seed = get_or<uint64_t>(j, "seed", c.seed);
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return spec;
}

ExplainerConfig parse_explainer(const json& j) {
  check_keys(j, {"r", "alpha", "beta", "lambda_con", "d_hidden", "lr", "epochs", "batch_size",
                 "seed", "inference"},
             "explainer");
  ExplainerConfig e;
  try {
    e.r = get_or<double>(j, "r", e.r);
    e.alpha = get_or<double>(j, "alpha", e.alpha);
    e.beta = get_or<double>(j, "beta", e.beta);
    e.lambda_con = get_or<double>(j, "lambda_con", e.lambda_con);
    e.d_hidden = get_or<int64_t>(j, "d_hidden", e.d_hidden);
    e.lr = get_or<double>(j, "lr", e.lr);
    e.epochs = get_or<int64_t>(j, "epochs", e.epochs);
    e.batch_size = get_or<int64_t>(j, "batch_size", e.batch_size);
    e.seed = get_or<uint64_t>(j, "seed", e.seed);
    if (j.contains("inference")) e.inference = inference_mode_from_string(j.at("inference"));
    validate(e);
  } catch (const std::invalid_argument& e2) {
    throw UsageError(std::string("config: ") + e2.what());
  }
  return e;
}

EvalSpec parse_eval(const json& j) {
  check_keys(j, {"metrics", "k_list", "substitution_modes", "substitution_fraction"}, "eval");
  EvalSpec e;
  if (j.contains("metrics")) e.metrics = j.at("metrics").get<std::vector<std::string>>();
  static const std::set<std::string> known = {"auprc", "aup", "aur", "occlusion", "substitution"};
  for (const std::string& m : e.metrics) {
    if (known.find(m) == known.end()) throw UsageError("config: unknown metric '" + m + "'");
  }
  if (e.metrics.empty()) throw UsageError("config: eval.metrics must not be empty");
  if (j.contains("k_list")) e.k_list = j.at("k_list").get<std::vector<double>>();
  for (double k : e.k_list) {
    if (!(k >= 0.0 && k <= 100.0)) {
      throw UsageError("config: eval.k_list entries must be percentages in [0, 100]");
    }
  }
  if (e.k_list.empty()) throw UsageError("config: eval.k_list must not be empty");
  if (j.contains("substitution_modes")) {
    e.substitution_modes = j.at("substitution_modes").get<std::vector<std::string>>();
  }
  for (const std::string& m : e.substitution_modes) {
    if (m != "mean" && m != "zero") {
      throw UsageError("config: substitution mode must be 'mean' or 'zero', got '" + m + "'");
    }
  }
  e.substitution_fraction = get_or<double>(j, "substitution_fraction", e.substitution_fraction);
  if (!(e.substitution_fraction > 0.0 && e.substitution_fraction < 1.0)) {
    throw UsageError("config: eval.substitution_fraction must lie in (0, 1)");
  }
  return e;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, {"dataset", "classifier", "explainer", "eval", "seeds", "output_dir"}, "config");

  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
    if (j.contains("classifier")) cfg.classifier = parse_classifier(j.at("classifier"));
    if (j.contains("explainer")) cfg.explainer = parse_explainer(j.at("explainer"));
    if (j.contains("eval")) cfg.eval = parse_eval(j.at("eval"));
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (cfg.seeds.empty()) throw UsageError("config: seeds must not be empty");
  if (cfg.output_dir.empty()) throw UsageError("config: output_dir must not be empty");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: cannot read ") + path + ": " + e.what());
  }
  return parse_experiment_config(text);
}

std::string seed_dir(const ExperimentConfig& cfg, uint64_t seed) {
  return cfg.output_dir + "/seed" + std::to_string(seed);
}

TimeSeriesDataset dataset_for_seed(const ExperimentConfig& cfg, uint64_t seed) {
  if (cfg.dataset.from_dir) return load_dataset(cfg.dataset.dir);
  GeneratorConfig g = cfg.dataset.gen;
  g.seed += seed;
  return generate_dataset(g);
}

}  // namespace ibts
