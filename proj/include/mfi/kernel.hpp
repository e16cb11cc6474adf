#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mfi/grid.hpp"

namespace mfi {

/// How the kernel value of a cell paired with itself is obtained.
enum class SelfCellRule {
    kAnalytic1D,      ///< closed-form cell average, n = 1 only
    kRefinedSubgrid,  ///< self-similar 4^n subgrid refinement, any n
    kDropDiagonal,    ///< self pairs contribute nothing (sensitivity runs)
};

[[nodiscard]] SelfCellRule default_self_cell_rule(int dim) noexcept;

/// Exponents of the product Riesz kernel |x-u|^{alpha-n} |y-v|^{beta-m}.
struct KernelSpec {
    double alpha;
    int n;
    double beta;
    int m;
    SelfCellRule rule_x;
    SelfCellRule rule_y;

    KernelSpec(double alpha, int n, double beta, int m);
    KernelSpec(double alpha, int n, double beta, int m, SelfCellRule rule_x, SelfCellRule rule_y);
};

/// Exact average of |t|^{alpha-dim} over the cube [-h/2, h/2]^dim with
/// h^dim = cell_volume.
[[nodiscard]] double self_cell_average(double cell_volume, double alpha, int dim,
                                       SelfCellRule rule);

/// One factor of the discretized kernel: |a-b|^{alpha-dim} for distinct cells,
/// the self-cell average when a == b.
[[nodiscard]] double kernel_factor(std::span<const double> center_a,
                                   std::span<const double> center_b, double cell_volume,
                                   double alpha, int dim, SelfCellRule rule);

/// Cone index ell with 2^{-ell} <= dx/dy < 2^{-ell+1}; nullopt when either
/// distance is zero (the pair lies in no cone).
[[nodiscard]] std::optional<int> cone_index(double dx_norm, double dy_norm);

/// Same classification from squared distances, exact for dyadic ratios.
[[nodiscard]] std::optional<int> cone_index_squared(double dx2, double dy2);

/// Kernel values and integer squared cell offsets for all cell pairs of one factor.
struct FactorKernelTable {
    std::size_t cells = 0;
    double step = 0.0;
    std::vector<double> kernel;         ///< cells x cells, row-major
    std::vector<long long> offset2;     ///< squared offset in cell units

    [[nodiscard]] double k(std::size_t a, std::size_t b) const noexcept {
        return kernel[a * cells + b];
    }
    [[nodiscard]] long long d2(std::size_t a, std::size_t b) const noexcept {
        return offset2[a * cells + b];
    }
};

[[nodiscard]] FactorKernelTable build_factor_kernel(const ProductGrid& grid, Factor f,
                                                    double alpha, SelfCellRule rule);

}  // namespace mfi
