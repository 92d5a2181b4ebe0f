#include <filesystem>
#include <stdexcept>

#include "ibts/checkpoint.hpp"
#include "ibts/classifier.hpp"
#include "ibts/io.hpp"
#include "json.hpp"

namespace ibts {

using nlohmann::json;

void save_classifier(const ClassifierModel& model, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_param_blobs(dir, model.params);

  json j;
  j["format"] = "ibts-classifier";
  j["format_version"] = 1;
  j["config"] = {{"encoder", encoder_kind_to_string(model.config.encoder)},
                 {"d_hidden", model.config.d_hidden},
                 {"dropout", model.config.dropout},
                 {"lr", model.config.lr},
                 {"weight_decay", model.config.weight_decay},
                 {"epochs", model.config.epochs},
                 {"batch_size", model.config.batch_size},
                 {"seed", model.config.seed}};
  j["dims"] = {{"T", model.T}, {"D", model.D}, {"C", model.C}};
  j["frozen"] = model.frozen;
  json tensors = json::array();
  for (const auto& [name, t] : model.params) {
    tensors.push_back({{"name", name}, {"shape", t.shape()}, {"file", name + ".bin"}});
  }
  j["tensors"] = tensors;
  write_text_atomic(dir + "/model.json", j.dump(2) + "\n");
}

ClassifierModel load_classifier(const std::string& dir) {
  const json j = json::parse(read_text(dir + "/model.json"));
  if (j.at("format").get<std::string>() != "ibts-classifier") {
    throw std::runtime_error("load_classifier: not a classifier checkpoint");
  }
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("load_classifier: unsupported format version");
  }

  ClassifierConfig cfg;
  const json& jc = j.at("config");
  cfg.encoder = encoder_kind_from_string(jc.at("encoder").get<std::string>());
  cfg.d_hidden = jc.at("d_hidden").get<int64_t>();
  cfg.dropout = jc.at("dropout").get<double>();
  cfg.lr = jc.at("lr").get<double>();
  cfg.weight_decay = jc.at("weight_decay").get<double>();
  cfg.epochs = jc.at("epochs").get<int64_t>();
  cfg.batch_size = jc.at("batch_size").get<int64_t>();
  cfg.seed = jc.at("seed").get<uint64_t>();

  const json& jd = j.at("dims");
  ClassifierModel model = init_classifier(cfg, jd.at("T").get<int64_t>(),
                                          jd.at("D").get<int64_t>(), jd.at("C").get<int64_t>());
  model.frozen = j.at("frozen").get<bool>();

  std::vector<std::pair<std::string, Shape>> manifest;
  for (const json& entry : j.at("tensors")) {
    manifest.emplace_back(entry.at("name").get<std::string>(), entry.at("shape").get<Shape>());
  }
  ParamSet loaded = load_param_blobs(dir, manifest);

  // The architecture implied by the config defines the parameter set; the
  // manifest must match it exactly.
  if (loaded.size() != model.params.size()) {
    throw std::runtime_error("load_classifier: checkpoint parameter set does not match config");
  }
  for (const auto& [name, t] : model.params) {
    auto it = loaded.find(name);
    if (it == loaded.end() || it->second.shape() != t.shape()) {
      throw std::runtime_error("load_classifier: bad or missing tensor '" + name + "'");
    }
  }
  model.params = std::move(loaded);
  return model;
}

}  // namespace ibts
