#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "shelab/grid.hpp"
#include "shelab/report.hpp"

namespace shelab {

enum class Exec { Serial, Parallel };

/// Behaviour of a grid function beyond t_max. The amplitude is fitted to the
/// last grid node, so only the shape is specified here.
struct TailModel {
  enum class Kind { Unknown, Zero, PowerLaw, Exponential };
  Kind kind = Kind::Unknown;
  double param = 0.0;  // decay exponent p, or rate

  static TailModel unknown() { return {}; }
  static TailModel zero() { return {Kind::Zero, 0.0}; }
  static TailModel power_law(double p) { return {Kind::PowerLaw, p}; }
  static TailModel exponential(double rate) { return {Kind::Exponential, rate}; }

  /// Tail value at t >= t_anchor given f(t_anchor) = anchor_value.
  double value(double t, double t_anchor, double anchor_value) const;
  double derivative(double t, double t_anchor, double anchor_value) const;
};

/// Zero-padded real FFT workspace for multipliers on a SymGrid.
class SpectralPlan {
 public:
  explicit SpectralPlan(const TimeGrid& grid, std::size_t padding = 4);

  const TimeGrid& grid() const { return grid_; }
  std::size_t padding() const { return padding_; }
  std::size_t padded_size() const { return m_; }
  /// Angular frequency of rfft bin k.
  double frequency(std::size_t k) const;

  /// Applies a Fourier multiplier to a SymGrid vector. The padding is filled
  /// with the antisymmetric continuation given by `tail` (zeros for Zero).
  std::vector<double> apply(std::span<const double> sym, const std::function<std::complex<double>(double)>& mult,
                            const TailModel& tail = TailModel::zero()) const;

  /// sum_i weight_i |tau|^{beta_i} (sym_i)^F with a single inverse transform.
  struct Term {
    std::span<const double> sym;
    double beta;
    double weight;
  };
  std::vector<double> apply_sum(std::span<const Term> terms) const;

 private:
  struct Fftw;
  TimeGrid grid_;
  std::size_t padding_;
  std::size_t m_;
  std::shared_ptr<Fftw> fftw_;
};

/// Inverse transform of |tau|^beta f^F, restricted to the SymGrid.
std::vector<double> frac_laplacian(std::span<const double> sym, double beta, const SpectralPlan& plan,
                                   const TailModel& tail = TailModel::zero());

/// True when the two outermost SymGrid values are below rel * max |f|.
bool decays_at_ends(std::span<const double> sym, double rel = 1e-6);

/// Spectral derivative of a SymGrid vector (multiplier i tau).
std::vector<double> spectral_derivative(std::span<const double> sym, const SpectralPlan& plan,
                                        const TailModel& tail = TailModel::zero());

/// out_i = sum_m k(i - m) src_m for i in [row_begin, row_end); kernel[j + N - 1] = k(j).
std::vector<double> toeplitz_apply(std::span<const double> kernel, std::span<const double> src, std::size_t row_begin,
                                   std::size_t row_end, Exec exec = Exec::Parallel);

/// A2 h = [sgn / sqrt(pi |.|)] * (h^a)', from samples of h' on the grid.
std::vector<double> op_A2_from_derivative(const TimeGrid& grid, std::span<const double> h_prime,
                                          Exec exec = Exec::Parallel);
std::vector<double> op_A2(const TestFunction& h, Exec exec = Exec::Parallel);

/// Grid function with the information A1 needs about its derivative and tail.
struct DecayedFunction {
  GridFunction f;
  TailModel tail;
  /// Optional exact derivative samples; otherwise the spectral derivative of
  /// the tail-continued f^a is used.
  std::optional<std::vector<double>> derivative;
};

/// Derivative samples used by op_A1.
std::vector<double> a1_derivative(const DecayedFunction& fd, const SpectralPlan& plan);

/// A1 f(t) = int_t^inf -f'(t') / sqrt(pi (t' - t)) dt' on the grid nodes.
std::vector<double> op_A1(const DecayedFunction& fd, const SpectralPlan& plan, Exec exec = Exec::Parallel);
/// Same at arbitrary points t in [0, t_max].
std::vector<double> op_A1_at(const DecayedFunction& fd, const SpectralPlan& plan, std::span<const double> ts);

/// [(4 pi |.|)^{-1/2} * f^a] on [0, t_max]; tail contributions beyond t_max
/// come from `tail` (Zero drops them).
std::vector<double> halfroot_conv(const GridFunction& f, const TailModel& tail = TailModel::zero(),
                                  Exec exec = Exec::Parallel);

/// Residual max |A1(A2 h) + h' - (-d^2)^{1/2} h^a| with tolerance 2e-2 ||h'||.
VerificationReport verify_A1A2_identity(const TestFunction& h, const SpectralPlan& plan);

/// Decay exponent of A2 outputs used for A1's tail model.
inline constexpr double kA2TailExponent = 2.5;

}  // namespace shelab
