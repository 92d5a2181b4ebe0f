#include "ibts/checkpoint.hpp"

#include <cstring>

#include "ibts/io.hpp"

namespace ibts {

namespace {

void fnv1a(uint64_t& h, const void* bytes, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

uint64_t params_fingerprint(const ParamSet& params) {
  uint64_t h = 14695981039346656037ULL;
  for (const auto& [name, t] : params) {
    fnv1a(h, name.data(), name.size());
    for (int64_t d : t.shape()) fnv1a(h, &d, sizeof(d));
    for (double v : t.data()) {
      const float f = static_cast<float>(v);
      fnv1a(h, &f, sizeof(f));
    }
  }
  return h;
}

void save_param_blobs(const std::string& dir, const ParamSet& params) {
  for (const auto& [name, t] : params) {
    write_f32_blob(dir + "/" + name + ".bin", t.data());
  }
}

ParamSet load_param_blobs(const std::string& dir,
                          const std::vector<std::pair<std::string, Shape>>& manifest) {
  ParamSet out;
  for (const auto& [name, shape] : manifest) {
    int64_t numel = 1;
    for (int64_t d : shape) numel *= d;
    out.emplace(name, Tensor(shape, read_f32_blob(dir + "/" + name + ".bin", numel)));
  }
  return out;
}

}  // namespace ibts
