#include "shelab/sheet.hpp"

#include <cmath>

#include "shelab/errors.hpp"
#include "shelab/rng.hpp"

namespace shelab {

SheetGeometry SheetGeometry::make(const SheetRect& rect, double dy, double ds) {
  if (!(dy > 0.0) || !(ds > 0.0)) throw DomainError("sheet: cell sizes must be positive");
  const double width = rect.y_max - rect.y_min;
  if (!(width > 0.0) || !(rect.s_max > 0.0)) throw DomainError("sheet: rectangle is empty");
  const double fy = width / dy, fs = rect.s_max / ds;
  const double ny = std::round(fy), ns = std::round(fs);
  if (std::abs(fy - ny) > 1e-9 * fy || std::abs(fs - ns) > 1e-9 * fs || ny < 1 || ns < 1)
    throw DomainError("sheet: rectangle is not tiled by whole cells");
  SheetGeometry g;
  g.y_min = rect.y_min;
  g.dy = dy;
  g.ny = static_cast<std::size_t>(ny);
  g.ds = ds;
  g.ns = static_cast<std::size_t>(ns);
  return g;
}

SheetSample sheet_sample(const SheetRect& rect, double dy, double ds, std::uint64_t seed, std::uint64_t stream,
                         std::size_t budget_bytes) {
  return sheet_sample(SheetGeometry::make(rect, dy, ds), seed, stream, budget_bytes);
}

SheetSample sheet_sample(const SheetGeometry& geom, std::uint64_t seed, std::uint64_t stream,
                         std::size_t budget_bytes) {
  const std::size_t cells = geom.cells();
  if (cells > budget_bytes / sizeof(double))
    throw ResourceError("sheet_sample: " + std::to_string(cells) + " cells exceed the memory budget of " +
                        std::to_string(budget_bytes) + " bytes");
  SheetSample s{geom, seed, stream, std::vector<double>(cells)};
  Engine eng = make_engine(seed, stream);
  Normal normal(0.0, std::sqrt(geom.dy * geom.ds));
  for (auto& v : s.increments) v = normal(eng);
  return s;
}

SheetSample zero_sheet(const SheetGeometry& geom) { return {geom, 0, 0, std::vector<double>(geom.cells(), 0.0)}; }

double CellWeights::isometry_variance() const {
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return acc * geom.dy * geom.ds;
}

CellWeights& CellWeights::axpy(double a, const CellWeights& other) {
  if (!(geom == other.geom)) throw DomainError("CellWeights: geometry mismatch");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += a * other.w[i];
  return *this;
}

double apply(const CellWeights& weights, const SheetSample& sheet) {
  if (!(weights.geom == sheet.geom)) throw DomainError("apply: weights and sheet have different geometry");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.w.size(); ++i) acc += weights.w[i] * sheet.increments[i];
  return acc;
}

std::vector<double> fused_apply(std::span<const CellWeights* const> weights, std::uint64_t seed,
                                std::uint64_t stream) {
  if (weights.empty()) return {};
  const SheetGeometry& g = weights.front()->geom;
  for (const auto* w : weights)
    if (!(w->geom == g)) throw DomainError("fused_apply: weights have different geometry");
  Engine eng = make_engine(seed, stream);
  Normal normal(0.0, std::sqrt(g.dy * g.ds));
  const std::size_t nf = weights.size();
  std::vector<double> acc(nf, 0.0);
  const std::size_t cells = g.cells();
  for (std::size_t i = 0; i < cells; ++i) {
    const double db = normal(eng);
    for (std::size_t f = 0; f < nf; ++f) acc[f] += weights[f]->w[i] * db;
  }
  return acc;
}

std::vector<std::vector<double>> replicate(std::span<const CellWeights* const> weights, std::uint64_t seed,
                                           std::size_t replicas, std::uint64_t first_stream, Exec exec) {
  std::vector<std::vector<double>> out(weights.size(), std::vector<double>(replicas));
  const auto nr = static_cast<std::ptrdiff_t>(replicas);
  auto body = [&](std::ptrdiff_t r) {
    const auto vals = fused_apply(weights, seed, first_stream + static_cast<std::uint64_t>(r));
    for (std::size_t f = 0; f < vals.size(); ++f) out[f][static_cast<std::size_t>(r)] = vals[f];
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < nr; ++r) body(r);
  } else {
    for (std::ptrdiff_t r = 0; r < nr; ++r) body(r);
  }
  return out;
}

}  // namespace shelab
