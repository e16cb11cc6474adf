#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mfi/characteristic.hpp"
#include "mfi/grid.hpp"
#include "mfi/operator.hpp"
#include "mfi/weights.hpp"

namespace mfi {

/// (sum |g w|^p vol)^{1/p}.
[[nodiscard]] double weighted_norm(const GridFunction& g, const GridFunction& w, double p);

struct InequalityRatio {
    double lhs = 0.0;       ///< || omega I f ||_p
    double rhs_norm = 0.0;  ///< || f sigma ||_p
    double ratio = 0.0;
};

[[nodiscard]] InequalityRatio inequality_ratio(const GridFunction& f, const WeightPair& w,
                                               const ExponentConfig& cfg);

enum class QuantityKind { kCharacteristic, kNormRatio };

struct DecayReport {
    std::vector<int> ell_values;
    std::vector<double> quantities;
    QuantityKind kind = QuantityKind::kCharacteristic;
    double fitted_epsilon = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    /// ell values requested but absent from the sequences (empty families).
    std::vector<int> dropped_ells;
};

enum class CorpusKind { kDyadicIndicators, kRandom, kSingleCells };

struct TestCorpus {
    std::vector<GridFunction> functions;
    std::vector<std::string> labels;

    void append(const TestCorpus& other);
    [[nodiscard]] std::size_t size() const noexcept { return functions.size(); }
};

/// Deterministic for a given seed. Indicator and single-cell corpora return the
/// whole family when count covers it and a seeded subsample (in family order)
/// otherwise; random corpora draw i.i.d. uniform (0, 1] cell values.
[[nodiscard]] TestCorpus build_corpus(const ProductGrid& grid, CorpusKind kind, std::size_t count,
                                      std::uint64_t seed);

/// Per ell, the largest ||omega D_ell I f||_p / ||f sigma||_p over the corpus.
/// Entries for empty cones are kept with quantity 0.
[[nodiscard]] DecayReport cone_norm_profile(const WeightPair& w, const ExponentConfig& cfg,
                                            EllRange ell_range, const TestCorpus& corpus);

/// Per ell, the eccentricity-restricted characteristic sup at exponent t.
[[nodiscard]] DecayReport characteristic_decay_profile(const WeightPair& w,
                                                       const ExponentConfig& cfg, double t,
                                                       EllRange ell_range);

/// Least-squares slope of log2(quantity) against -|ell| over entries with
/// |ell| >= 1 and positive quantity; residual is the RMS misfit (log2 scale).
[[nodiscard]] DecayReport fit_decay_rate(DecayReport report);

/// The three equal members of the dilation chain for the characteristic of one
/// rectangle. For the first factor (x -> 2^{-ell} x):
///   line1 = non-averaged value with omega(2^{-ell}x, y), sigma(2^{-ell}x, y)
///   line2 = averaged value of the same composed weights
///   line3 = 2^{alpha ell} * value on the first-factor box shrunk by 2^{-ell}
/// For the second factor (y -> 2^{ell} y) the prefactor of line3 is 2^{-beta ell}.
struct DilationLines {
    double line1 = 0.0;
    double line2 = 0.0;
    double line3 = 0.0;
};

[[nodiscard]] DilationLines characteristic_dilation_identity(const PowerWeightFamily& family,
                                                             const ProductGrid& grid,
                                                             const ExponentConfig& cfg, double t,
                                                             const DyadicRectangle& r, int ell,
                                                             Factor factor);

/// Both sides of the change of variables x -> 2^{-ell} x, u -> 2^{-ell} u for
/// ||omega D_ell I f||_p: lhs on the grid, rhs as the cone-0 sum on the
/// first-factor box enlarged by 2^{ell} with rescaled kernel and measures.
struct OperatorDilationSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

using AnalyticFunction = std::function<double(const FactorPoint&, const FactorPoint&)>;

[[nodiscard]] OperatorDilationSides operator_dilation_identity(const AnalyticFunction& f,
                                                               const AnalyticFunction& omega,
                                                               const ProductGrid& grid,
                                                               const ExponentConfig& cfg,
                                                               int ell);

}  // namespace mfi
