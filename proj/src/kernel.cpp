#include "mfi/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

#include "mfi/error.hpp"

namespace mfi {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

constexpr double kRefinementTruncation = 1e-14;

void check_alpha(double alpha, int dim) {
    if (dim < 1 || dim > kMaxFactorDim) throw InvalidArgument("kernel: dimension must be 1 or 2");
    if (!(alpha > 0.0 && alpha < dim)) {
        throw InvalidArgument("kernel: alpha must satisfy 0 < alpha < dim");
    }
}

// Integral of |t|^{alpha-dim} over [-h/2,h/2]^dim minus the central [-h/4,h/4]^dim,
// taken subcell by subcell on the 4^dim subgrid.
double ring_integral(double h, double alpha, int dim) {
    const double sub = h / 4.0;
    const double ex = alpha - dim;
    double total = 0.0;
    if (dim == 1) {
        for (int i = 0; i < 4; ++i) {
            if (i == 1 || i == 2) continue;
            const double a = -h / 2 + i * sub;
            total += Gauss::integrate([&](double t) { return std::pow(std::abs(t), ex); }, a,
                                      a + sub);
        }
        return total;
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if ((i == 1 || i == 2) && (j == 1 || j == 2)) continue;
            const double ax = -h / 2 + i * sub;
            const double ay = -h / 2 + j * sub;
            total += Gauss::integrate(
                [&](double x) {
                    return Gauss::integrate(
                        [&](double y) { return std::pow(x * x + y * y, 0.5 * ex); }, ay,
                        ay + sub);
                },
                ax, ax + sub);
        }
    }
    return total;
}

// The central block is the same problem at half the scale, which rescales the
// ring contribution by 2^{-alpha} per level.
double refined_subgrid_average(double h, double alpha, int dim) {
    const double ring = ring_integral(h, alpha, dim);
    const double level_ratio = std::pow(2.0, -alpha);
    double sum = 0.0;
    double term = ring;
    for (int level = 0; level < 100000; ++level) {
        sum += term;
        if (term < kRefinementTruncation * sum) break;
        term *= level_ratio;
    }
    return sum / std::pow(h, dim);
}

}  // namespace

SelfCellRule default_self_cell_rule(int dim) noexcept {
    return dim == 1 ? SelfCellRule::kAnalytic1D : SelfCellRule::kRefinedSubgrid;
}

KernelSpec::KernelSpec(double alpha_, int n_, double beta_, int m_)
    : KernelSpec(alpha_, n_, beta_, m_, default_self_cell_rule(n_), default_self_cell_rule(m_)) {}

KernelSpec::KernelSpec(double alpha_, int n_, double beta_, int m_, SelfCellRule rx,
                       SelfCellRule ry)
    : alpha(alpha_), n(n_), beta(beta_), m(m_), rule_x(rx), rule_y(ry) {
    check_alpha(alpha, n);
    check_alpha(beta, m);
    if ((rule_x == SelfCellRule::kAnalytic1D && n != 1) ||
        (rule_y == SelfCellRule::kAnalytic1D && m != 1)) {
        throw InvalidArgument("kernel: the analytic self-cell rule requires dimension 1");
    }
}

double self_cell_average(double cell_volume, double alpha, int dim, SelfCellRule rule) {
    check_alpha(alpha, dim);
    if (!(cell_volume > 0.0)) throw InvalidArgument("kernel: cell volume must be positive");
    const double h = std::pow(cell_volume, 1.0 / dim);
    switch (rule) {
        case SelfCellRule::kAnalytic1D:
            if (dim != 1) {
                throw InvalidArgument("kernel: the analytic self-cell rule requires dimension 1");
            }
            return (1.0 / h) * 2.0 * std::pow(h / 2.0, alpha) / alpha;
        case SelfCellRule::kRefinedSubgrid:
            return refined_subgrid_average(h, alpha, dim);
        case SelfCellRule::kDropDiagonal:
            return 0.0;
    }
    return 0.0;
}

double kernel_factor(std::span<const double> center_a, std::span<const double> center_b,
                     double cell_volume, double alpha, int dim, SelfCellRule rule) {
    check_alpha(alpha, dim);
    if (center_a.size() < static_cast<std::size_t>(dim) ||
        center_b.size() < static_cast<std::size_t>(dim)) {
        throw InvalidArgument("kernel: center has fewer coordinates than the dimension");
    }
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double d = center_a[k] - center_b[k];
        d2 += d * d;
    }
    if (d2 == 0.0) return self_cell_average(cell_volume, alpha, dim, rule);
    return std::pow(d2, 0.5 * (alpha - dim));
}

std::optional<int> cone_index(double dx_norm, double dy_norm) {
    if (!(dx_norm > 0.0) || !(dy_norm > 0.0)) return std::nullopt;
    int e = 0;
    std::frexp(dx_norm / dy_norm, &e);
    // ratio in [2^{e-1}, 2^e)  =>  ell = 1 - e
    return 1 - e;
}

std::optional<int> cone_index_squared(double dx2, double dy2) {
    if (!(dx2 > 0.0) || !(dy2 > 0.0)) return std::nullopt;
    int e = 0;
    std::frexp(dx2 / dy2, &e);
    // ratio^2 in [2^{e-1}, 2^e); need 4^{-ell} <= ratio^2 < 4^{-ell+1}
    const int lower = e - 1;
    const int half_floor = lower >= 0 ? lower / 2 : -((-lower + 1) / 2);
    return -half_floor;
}

FactorKernelTable build_factor_kernel(const ProductGrid& grid, Factor f, double alpha,
                                      SelfCellRule rule) {
    const int dim = grid.dim(f);
    check_alpha(alpha, dim);
    if (rule == SelfCellRule::kAnalytic1D && dim != 1) {
        throw InvalidArgument("kernel: the analytic self-cell rule requires dimension 1");
    }
    FactorKernelTable t;
    t.cells = grid.factor_cells(f);
    t.step = grid.step(f);
    t.kernel.resize(t.cells * t.cells);
    t.offset2.resize(t.cells * t.cells);
    const double self = self_cell_average(grid.cell_volume(f), alpha, dim, rule);
    const double ex = 0.5 * (alpha - dim);
    for (std::size_t a = 0; a < t.cells; ++a) {
        const FactorIndex ia = grid.multi_index(f, a);
        for (std::size_t b = 0; b < t.cells; ++b) {
            const FactorIndex ib = grid.multi_index(f, b);
            long long d2 = 0;
            for (int k = 0; k < dim; ++k) {
                const long long d = ia[k] - ib[k];
                d2 += d * d;
            }
            t.offset2[a * t.cells + b] = d2;
            t.kernel[a * t.cells + b] =
                d2 == 0 ? self : std::pow(static_cast<double>(d2) * t.step * t.step, ex);
        }
    }
    return t;
}

}  // namespace mfi
