#include "ibts/io.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little, "on-disk formats are little-endian");

namespace ibts {

void write_file_atomic(const std::string& path, const void* bytes, size_t n) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(static_cast<const char*>(bytes), static_cast<std::streamsize>(n));
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("short write: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed for " + path + ": " + ec.message());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open: " + path);
  auto n = in.tellg();
  std::vector<char> buf(static_cast<size_t>(n));
  in.seekg(0);
  in.read(buf.data(), n);
  if (!in) throw std::runtime_error("short read: " + path);
  return buf;
}

void write_f32_blob(const std::string& path, const std::vector<double>& values) {
  std::vector<float> f(values.size());
  for (size_t i = 0; i < values.size(); ++i) f[i] = static_cast<float>(values[i]);
  write_file_atomic(path, f.data(), f.size() * sizeof(float));
}

std::vector<double> read_f32_blob(const std::string& path, int64_t expected_count) {
  std::vector<char> raw = read_bytes(path);
  if (raw.size() != static_cast<size_t>(expected_count) * sizeof(float))
    throw std::runtime_error(path + ": size " + std::to_string(raw.size()) + " does not hold " +
                             std::to_string(expected_count) + " float32 values");
  const float* f = reinterpret_cast<const float*>(raw.data());
  std::vector<double> out(static_cast<size_t>(expected_count));
  for (int64_t i = 0; i < expected_count; ++i) out[static_cast<size_t>(i)] = static_cast<double>(f[i]);
  return out;
}

}  // namespace ibts
