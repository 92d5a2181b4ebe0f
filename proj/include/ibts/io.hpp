#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ibts {

// All writers go through a temp file in the target directory followed by a
// rename, so readers never observe partial files.
void write_file_atomic(const std::string& path, const void* bytes, size_t n);
void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
std::vector<char> read_bytes(const std::string& path);

// Row-major float32 little-endian blobs (the on-disk tensor format). Values
// are float64 in memory and truncated to float32 on write.
void write_f32_blob(const std::string& path, const std::vector<double>& values);
std::vector<double> read_f32_blob(const std::string& path, int64_t expected_count);

}  // namespace ibts
