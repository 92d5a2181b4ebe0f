#include <cstring>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "ibts/dataset.hpp"
#include "ibts/io.hpp"
#include "json.hpp"

namespace ibts {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& keys, const std::string& where) {
  for (const auto& k : keys)
    if (!j.contains(k)) throw std::runtime_error(where + ": missing key '" + k + "'");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw std::runtime_error(where + ": unknown key '" + it.key() + "'");
}

}  // namespace

void save_dataset(const TimeSeriesDataset& ds, const std::string& dir) {
  if (ds.N != ds.splits.train + ds.splits.val + ds.splits.test)
    throw std::invalid_argument("save_dataset: split sizes do not sum to N");
  std::filesystem::create_directories(dir);
  json manifest = {
      {"format_version", 1},
      {"name", ds.name},
      {"N", ds.N},
      {"T", ds.T},
      {"D", ds.D},
      {"C", ds.C},
      {"has_truth", ds.has_truth},
      {"byte_order", "little"},
      {"dtype", {{"X", "f32"}, {"Y", "i32"}, {"Q", "u8"}}},
      {"splits", {{"train", ds.splits.train}, {"val", ds.splits.val}, {"test", ds.splits.test}}},
  };
  write_file_atomic(dir + "/X.bin", ds.X.data(), ds.X.size() * sizeof(float));
  write_file_atomic(dir + "/Y.bin", ds.Y.data(), ds.Y.size() * sizeof(int32_t));
  if (ds.has_truth) write_file_atomic(dir + "/Q.bin", ds.Q.data(), ds.Q.size());
  write_text_atomic(dir + "/manifest.json", manifest.dump(2) + "\n");
}

TimeSeriesDataset load_dataset(const std::string& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text(dir + "/manifest.json"));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(dir + "/manifest.json: " + e.what());
  }
  require_keys(manifest,
               {"format_version", "name", "N", "T", "D", "C", "has_truth", "byte_order", "dtype", "splits"},
               dir + "/manifest.json");
  if (manifest["format_version"] != 1)
    throw std::runtime_error(dir + ": unsupported format_version " + manifest["format_version"].dump());
  if (manifest["byte_order"] != "little") throw std::runtime_error(dir + ": unsupported byte order");
  if (manifest["dtype"] != json({{"X", "f32"}, {"Y", "i32"}, {"Q", "u8"}}))
    throw std::runtime_error(dir + ": unsupported dtype table " + manifest["dtype"].dump());

  TimeSeriesDataset ds;
  ds.name = manifest["name"].get<std::string>();
  ds.N = manifest["N"].get<int64_t>();
  ds.T = manifest["T"].get<int64_t>();
  ds.D = manifest["D"].get<int64_t>();
  ds.C = manifest["C"].get<int64_t>();
  ds.has_truth = manifest["has_truth"].get<bool>();
  require_keys(manifest["splits"], {"train", "val", "test"}, dir + ": splits");
  ds.splits.train = manifest["splits"]["train"].get<int64_t>();
  ds.splits.val = manifest["splits"]["val"].get<int64_t>();
  ds.splits.test = manifest["splits"]["test"].get<int64_t>();
  if (ds.N <= 0 || ds.T <= 0 || ds.D <= 0 || ds.C < 2) throw std::runtime_error(dir + ": invalid dimensions");
  if (ds.N != ds.splits.train + ds.splits.val + ds.splits.test)
    throw std::runtime_error(dir + ": split sizes do not sum to N");

  size_t cells = static_cast<size_t>(ds.N * ds.T * ds.D);
  auto xraw = read_bytes(dir + "/X.bin");
  if (xraw.size() != cells * sizeof(float))
    throw std::runtime_error(dir + "/X.bin: size mismatch for (N,T,D) = (" + std::to_string(ds.N) + "," +
                             std::to_string(ds.T) + "," + std::to_string(ds.D) + ")");
  ds.X.resize(cells);
  std::memcpy(ds.X.data(), xraw.data(), xraw.size());

  auto yraw = read_bytes(dir + "/Y.bin");
  if (yraw.size() != static_cast<size_t>(ds.N) * sizeof(int32_t))
    throw std::runtime_error(dir + "/Y.bin: size mismatch for N = " + std::to_string(ds.N));
  ds.Y.resize(static_cast<size_t>(ds.N));
  std::memcpy(ds.Y.data(), yraw.data(), yraw.size());
  for (int32_t y : ds.Y)
    if (y < 0 || y >= ds.C) throw std::runtime_error(dir + "/Y.bin: label out of range [0, C)");

  if (ds.has_truth) {
    auto qraw = read_bytes(dir + "/Q.bin");
    if (qraw.size() != cells) throw std::runtime_error(dir + "/Q.bin: size mismatch");
    ds.Q.assign(qraw.begin(), qraw.end());
    for (uint8_t q : ds.Q)
      if (q > 1) throw std::runtime_error(dir + "/Q.bin: values must be 0 or 1");
  }
  return ds;
}

}  // namespace ibts
