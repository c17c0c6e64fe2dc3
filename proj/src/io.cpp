#include "gffpin/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gffpin/common.hpp"

namespace gffpin {

namespace {

constexpr std::array<char, 8> kFieldMagic = {'G', 'F', 'F', 'P', 'I', 'N', 'S', '1'};
constexpr std::array<char, 8> kGreenMagic = {'G', 'F', 'F', 'P', 'I', 'N', 'G', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("binary read: truncated file");
  return v;
}

std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::binary) {
  std::ofstream os(p, mode);
  if (!os) throw ConfigError("cannot open for writing: " + p.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot open for reading: " + p.string());
  return is;
}

struct Snapshot {
  SnapshotTag tag;
  int N;
  double m;
  std::uint64_t seed;
  std::uint32_t aux;
  std::vector<double> data;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  auto os = open_out(path);
  os.write(kFieldMagic.data(), kFieldMagic.size());
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(s.tag));
  put(os, static_cast<std::int32_t>(s.N));
  put(os, s.m);
  put(os, s.seed);
  put(os, s.aux);
  put(os, static_cast<std::uint64_t>(s.data.size()));
  os.write(reinterpret_cast<const char*>(s.data.data()),
           static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  put(os, checksum(s.data));
  if (!os) throw ConfigError("binary write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path, SnapshotTag expect) {
  auto is = open_in(path);
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kFieldMagic) throw ConfigError("not a gffpin snapshot: " + path.string());
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("snapshot version mismatch");
  Snapshot s;
  s.tag = static_cast<SnapshotTag>(get<std::uint32_t>(is));
  if (s.tag != expect) throw ConfigError("snapshot tag mismatch");
  s.N = get<std::int32_t>(is);
  s.m = get<double>(is);
  s.seed = get<std::uint64_t>(is);
  s.aux = get<std::uint32_t>(is);
  const auto count = get<std::uint64_t>(is);
  if (s.N < 1 || count != static_cast<std::uint64_t>(s.N + 1) * (s.N + 1))
    throw ConfigError("snapshot size does not match N");
  s.data.resize(count);
  is.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw ConfigError("binary read: truncated payload");
  if (get<std::uint64_t>(is) != checksum(s.data)) throw NumericError("snapshot checksum mismatch");
  return s;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t checksum(const std::vector<double>& v) {
  return fnv1a64({reinterpret_cast<const unsigned char*>(v.data()), v.size() * sizeof(double)});
}

void write_field_binary(const std::filesystem::path& path, const FieldSample& s) {
  Snapshot snap{SnapshotTag::Field, s.N, s.m, s.seed, 0, s.phi};
  for (std::size_t i = 0; i < snap.data.size(); ++i) snap.data[i] += s.h_at(static_cast<int>(i));
  write_snapshot(path, snap);
}

FieldSample read_field_binary(const std::filesystem::path& path) {
  Snapshot snap = read_snapshot(path, SnapshotTag::Field);
  FieldSample s;
  s.N = snap.N;
  s.m = snap.m;
  s.seed = snap.seed;
  s.phi = std::move(snap.data);
  const BoxGeometry g(s.N);
  std::vector<double> b;
  bool zero = true;
  for (int x : g.boundary_sites()) {
    b.push_back(s.phi[x]);
    zero = zero && s.phi[x] == 0.0;
  }
  if (!zero) s.bc = BoundaryCondition::explicit_values(std::move(b));
  return s;
}

void write_disorder_binary(const std::filesystem::path& path, const DisorderField& d) {
  write_snapshot(path, {SnapshotTag::Disorder, d.N, 0.0, d.seed,
                        static_cast<std::uint32_t>(d.spec.kind), d.omega});
}

DisorderField read_disorder_binary(const std::filesystem::path& path) {
  Snapshot snap = read_snapshot(path, SnapshotTag::Disorder);
  DisorderField d;
  d.N = snap.N;
  d.seed = snap.seed;
  if (snap.aux == static_cast<std::uint32_t>(DisorderKind::Bernoulli))
    d.spec = DisorderSpec::bernoulli();
  d.omega = std::move(snap.data);
  return d;
}

void write_field_csv(const std::filesystem::path& path, const FieldSample& s) {
  if (s.N > 256) throw ContractError("write_field_csv: N too large for CSV export");
  CsvWriter w(path, {"x1", "x2", "phi"});
  const int side = s.N + 1;
  for (int x2 = 0; x2 < side; ++x2)
    for (int x1 = 0; x1 < side; ++x1) {
      const int i = x2 * side + x1;
      w.row({static_cast<double>(x1), static_cast<double>(x2), s.phi[i] + s.h_at(i)});
    }
}

void write_green_cache(const std::filesystem::path& path, const GreenTable& t) {
  auto os = open_out(path);
  os.write(kGreenMagic.data(), kGreenMagic.size());
  put(os, kVersion);
  put(os, static_cast<std::int32_t>(t.N));
  put(os, t.m);
  put(os, static_cast<std::uint32_t>(t.kind));
  put(os, static_cast<std::uint64_t>(t.sites.size()));
  for (int s : t.sites) put(os, static_cast<std::int32_t>(s));
  std::vector<double> v(t.values.data(), t.values.data() + t.values.size());
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  put(os, checksum(v));
  if (!os) throw ConfigError("green cache write failed: " + path.string());
}

GreenTable read_green_cache(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kGreenMagic) throw ConfigError("not a gffpin green cache: " + path.string());
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("green cache version mismatch");
  GreenTable t;
  t.N = get<std::int32_t>(is);
  t.m = get<double>(is);
  t.kind = static_cast<GreenKind>(get<std::uint32_t>(is));
  const auto n = get<std::uint64_t>(is);
  if (n > (1u << 24)) throw ConfigError("green cache: implausible site count");
  t.sites.resize(n);
  for (auto& s : t.sites) s = get<std::int32_t>(is);
  std::vector<double> v(n * n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw ConfigError("green cache: truncated payload");
  if (get<std::uint64_t>(is) != checksum(v)) throw NumericError("green cache checksum mismatch");
  t.values = Eigen::Map<Eigen::MatrixXd>(v.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return t;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
  auto os = open_out(path, std::ios::binary | std::ios::trunc);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(format_double(v));
  row_strings(s);
}

void CsvWriter::row_strings(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw ContractError("CsvWriter: column count mismatch");
  auto os = open_out(path_, std::ios::binary | std::ios::app);
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  os << '\n';
}

void append_jsonl(const std::filesystem::path& path, const nlohmann::json& record) {
  auto os = open_out(path, std::ios::binary | std::ios::app);
  os << record.dump() << '\n';
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open for reading: " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace gffpin
