#include <cmath>
#include <cstring>
#include <fstream>

#include "shelab/errors.hpp"
#include "shelab/sheet.hpp"

namespace shelab {

namespace {

constexpr char kMagic[4] = {'S', 'H', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(char*& p, T v) {
  std::memcpy(p, &v, sizeof(T));
  p += sizeof(T);
}

template <class T>
T get(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace

void write_matrix_dump(const std::string& path, const MatrixDumpHeader& h, std::span<const double> values) {
  char header[64];
  char* p = header;
  std::memcpy(p, kMagic, 4);
  p += 4;
  put(p, kVersion);
  put(p, h.dy);
  put(p, h.ds);
  put(p, h.y_min);
  put(p, h.y_max);
  put(p, h.s_max);
  put(p, h.seed);
  put(p, h.stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(header, sizeof header);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sheet_dump(const std::string& path, const SheetSample& s) {
  write_matrix_dump(path, {s.geom.dy, s.geom.ds, s.geom.y_min, s.geom.y_max(), s.geom.s_max(), s.seed, s.stream},
                    s.increments);
}

SheetSample read_sheet_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char header[64];
  in.read(header, sizeof header);
  if (!in || std::memcmp(header, kMagic, 4) != 0) throw DomainError("not a sheet dump: " + path);
  const char* p = header + 4;
  if (get<std::uint32_t>(p) != kVersion) throw DomainError("unsupported dump version: " + path);
  const double dy = get<double>(p), ds = get<double>(p), y_min = get<double>(p), y_max = get<double>(p),
               s_max = get<double>(p);
  SheetSample s;
  s.seed = get<std::uint64_t>(p);
  s.stream = get<std::uint64_t>(p);
  s.geom = SheetGeometry::make({y_min, y_max, s_max}, dy, ds);
  s.increments.resize(s.geom.cells());
  in.read(reinterpret_cast<char*>(s.increments.data()), static_cast<std::streamsize>(s.increments.size() * sizeof(double)));
  if (!in) throw DomainError("truncated sheet dump: " + path);
  return s;
}

}  // namespace shelab
