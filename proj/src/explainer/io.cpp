#include <filesystem>
#include <stdexcept>

#include "ibts/checkpoint.hpp"
#include "ibts/explainer.hpp"
#include "ibts/io.hpp"
#include "json.hpp"

namespace ibts {

using nlohmann::json;

void save_explainer(const ExplainerModel& model, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_param_blobs(dir, model.params);
  write_f32_blob(dir + "/mu.bin", model.baseline.mu);
  write_f32_blob(dir + "/sigma.bin", model.baseline.sigma);

  json j;
  j["format"] = "ibts-explainer";
  j["format_version"] = 1;
  j["config"] = {{"r", model.config.r},
                 {"alpha", model.config.alpha},
                 {"beta", model.config.beta},
                 {"lambda_con", model.config.lambda_con},
                 {"d_hidden", model.config.d_hidden},
                 {"lr", model.config.lr},
                 {"epochs", model.config.epochs},
                 {"batch_size", model.config.batch_size},
                 {"seed", model.config.seed},
                 {"inference", inference_mode_to_string(model.config.inference)}};
  j["dims"] = {{"T", model.T}, {"D", model.D}};
  j["classifier_fingerprint"] = model.classifier_fingerprint;
  json tensors = json::array();
  for (const auto& [name, t] : model.params) {
    tensors.push_back({{"name", name}, {"shape", t.shape()}, {"file", name + ".bin"}});
  }
  j["tensors"] = tensors;
  write_text_atomic(dir + "/model.json", j.dump(2) + "\n");
}

ExplainerModel load_explainer(const std::string& dir) {
  const json j = json::parse(read_text(dir + "/model.json"));
  if (j.at("format").get<std::string>() != "ibts-explainer") {
    throw std::runtime_error("load_explainer: not an explainer checkpoint");
  }
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("load_explainer: unsupported format version");
  }

  ExplainerConfig cfg;
  const json& jc = j.at("config");
  cfg.r = jc.at("r").get<double>();
  cfg.alpha = jc.at("alpha").get<double>();
  cfg.beta = jc.at("beta").get<double>();
  cfg.lambda_con = jc.at("lambda_con").get<double>();
  cfg.d_hidden = jc.at("d_hidden").get<int64_t>();
  cfg.lr = jc.at("lr").get<double>();
  cfg.epochs = jc.at("epochs").get<int64_t>();
  cfg.batch_size = jc.at("batch_size").get<int64_t>();
  cfg.seed = jc.at("seed").get<uint64_t>();
  cfg.inference = inference_mode_from_string(jc.at("inference").get<std::string>());

  const json& jd = j.at("dims");
  ExplainerModel model = init_explainer(cfg, jd.at("T").get<int64_t>(), jd.at("D").get<int64_t>());
  model.classifier_fingerprint = j.at("classifier_fingerprint").get<uint64_t>();

  model.baseline.T = model.T;
  model.baseline.D = model.D;
  const int64_t cells = model.T * model.D;
  model.baseline.mu = read_f32_blob(dir + "/mu.bin", cells);
  model.baseline.sigma = read_f32_blob(dir + "/sigma.bin", cells);

  std::vector<std::pair<std::string, Shape>> manifest;
  for (const json& entry : j.at("tensors")) {
    manifest.emplace_back(entry.at("name").get<std::string>(), entry.at("shape").get<Shape>());
  }
  ParamSet loaded = load_param_blobs(dir, manifest);
  if (loaded.size() != model.params.size()) {
    throw std::runtime_error("load_explainer: checkpoint parameter set does not match config");
  }
  for (const auto& [name, t] : model.params) {
    auto it = loaded.find(name);
    if (it == loaded.end() || it->second.shape() != t.shape()) {
      throw std::runtime_error("load_explainer: bad or missing tensor '" + name + "'");
    }
  }
  model.params = std::move(loaded);
  return model;
}

}  // namespace ibts
