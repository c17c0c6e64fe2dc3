#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gffpin/disorder.hpp"
#include "gffpin/fields.hpp"
#include "gffpin/kernels.hpp"

namespace gffpin {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t checksum(const std::vector<double>& v);

// Flat binary snapshot: 8-byte magic, u32 version, u32 tag, i32 N, f64 m,
// u64 seed, u32 aux, u64 count, count doubles (row-major), u64 checksum.
enum class SnapshotTag : std::uint32_t { Field = 1, Disorder = 2 };

// The payload is the full field phi + H.
void write_field_binary(const std::filesystem::path& path, const FieldSample& s);
FieldSample read_field_binary(const std::filesystem::path& path);

void write_disorder_binary(const std::filesystem::path& path, const DisorderField& d);
// The tabulated support is not stored; a tabulated field reads back with the
// Gaussian spec unless the caller reattaches its own.
DisorderField read_disorder_binary(const std::filesystem::path& path);

// Columns x1,x2,phi for N <= 256.
void write_field_csv(const std::filesystem::path& path, const FieldSample& s);

// GreenTable cache keyed by (N, m, kind) with a version header and checksum.
void write_green_cache(const std::filesystem::path& path, const GreenTable& t);
GreenTable read_green_cache(const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row_strings(const std::vector<std::string>& values);

 private:
  std::filesystem::path path_;
  std::size_t columns_;
};

void append_jsonl(const std::filesystem::path& path, const nlohmann::json& record);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

}  // namespace gffpin
