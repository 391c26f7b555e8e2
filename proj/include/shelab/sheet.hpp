#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shelab/fracops.hpp"

namespace shelab {

struct SheetRect {
  double y_min;
  double y_max;
  double s_max;
};

/// Cell layout of a sheet on [y_min, y_min + ny dy] x [0, ns ds].
struct SheetGeometry {
  double y_min = 0.0;
  double dy = 1.0;
  std::size_t ny = 0;
  double ds = 1.0;
  std::size_t ns = 0;

  /// The rectangle must be tiled by whole cells (relative slack 1e-9).
  static SheetGeometry make(const SheetRect& rect, double dy, double ds);

  double y_max() const { return y_min + static_cast<double>(ny) * dy; }
  double s_max() const { return static_cast<double>(ns) * ds; }
  double y_center(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * dy; }
  double s_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * ds; }
  std::size_t cells() const { return ny * ns; }
  std::size_t index(std::size_t j, std::size_t k) const { return j * ns + k; }
  bool operator==(const SheetGeometry& o) const {
    return y_min == o.y_min && dy == o.dy && ny == o.ny && ds == o.ds && ns == o.ns;
  }
};

/// Brownian-sheet increments, row-major in (y, s), variance dy ds each.
struct SheetSample {
  SheetGeometry geom;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> increments;

  double at(std::size_t j, std::size_t k) const { return increments[geom.index(j, k)]; }
};

inline constexpr std::size_t kDefaultSheetBudgetBytes = std::size_t{1} << 30;

/// Deterministic function of (seed, stream).
SheetSample sheet_sample(const SheetRect& rect, double dy, double ds, std::uint64_t seed, std::uint64_t stream,
                         std::size_t budget_bytes = kDefaultSheetBudgetBytes);
SheetSample sheet_sample(const SheetGeometry& geom, std::uint64_t seed, std::uint64_t stream,
                         std::size_t budget_bytes = kDefaultSheetBudgetBytes);
SheetSample zero_sheet(const SheetGeometry& geom);

/// Deterministic cell weights w_jk of a linear sheet functional sum w dB.
struct CellWeights {
  SheetGeometry geom;
  std::vector<double> w;

  explicit CellWeights(const SheetGeometry& g) : geom(g), w(g.cells(), 0.0) {}
  double& at(std::size_t j, std::size_t k) { return w[geom.index(j, k)]; }
  double at(std::size_t j, std::size_t k) const { return w[geom.index(j, k)]; }
  /// Discrete Ito isometry: sum w^2 dy ds.
  double isometry_variance() const;
  CellWeights& axpy(double a, const CellWeights& other);
};

double apply(const CellWeights& weights, const SheetSample& sheet);

/// Values of several functionals on the sheet of (seed, stream), generated
/// on the fly. Bit-identical to sheet_sample followed by apply.
std::vector<double> fused_apply(std::span<const CellWeights* const> weights, std::uint64_t seed,
                                std::uint64_t stream);

/// result[f][r]: functional f on replica r (stream = first_stream + r).
std::vector<std::vector<double>> replicate(std::span<const CellWeights* const> weights, std::uint64_t seed,
                                           std::size_t replicas, std::uint64_t first_stream = 0,
                                           Exec exec = Exec::Parallel);

/// Binary dump: 64-byte header (magic "SHLB", version, dy, ds, y_min, y_max,
/// s_max, seed, stream) then row-major float64 values.
void write_sheet_dump(const std::string& path, const SheetSample& sheet);
SheetSample read_sheet_dump(const std::string& path);

struct MatrixDumpHeader {
  double dy, ds, y_min, y_max, s_max;
  std::uint64_t seed, stream;
};
void write_matrix_dump(const std::string& path, const MatrixDumpHeader& h, std::span<const double> values);

}  // namespace shelab
