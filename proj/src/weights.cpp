#include "mfi/weights.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "mfi/error.hpp"

namespace mfi {

WeightPair::WeightPair(GridFunction omega, GridFunction sigma)
    : omega_(std::move(omega)), sigma_(std::move(sigma)) {
    if (!(omega_.grid() == sigma_.grid())) throw InvalidArgument("weights: grid mismatch");
    for (double v : omega_.values()) {
        if (v < 0.0) throw InvalidArgument("weights: omega must be nonnegative");
    }
    for (double v : sigma_.values()) {
        if (v < 0.0) throw InvalidArgument("weights: sigma must be nonnegative");
    }
}

WeightPair WeightPair::with_omega_scaled(double c) const {
    return WeightPair(omega_.scaled(c), sigma_);
}

WeightPair WeightPair::with_sigma_scaled(double c) const {
    return WeightPair(omega_, sigma_.scaled(c));
}

WeightPair unit_weights(const ProductGrid& grid) {
    std::vector<double> ones(grid.size(), 1.0);
    return WeightPair(GridFunction(grid, ones), GridFunction(grid, ones));
}

double factor_norm(const FactorPoint& x, int dim) noexcept {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += x[k] * x[k];
    return std::sqrt(s);
}

double PowerWeightFamily::omega(const FactorPoint& x, int n, const FactorPoint& y, int m) const {
    return std::pow(factor_norm(x, n) + delta, -a) * std::pow(factor_norm(y, m) + delta, -b);
}

double PowerWeightFamily::sigma(const FactorPoint& x, int n, const FactorPoint& y, int m) const {
    return std::pow(factor_norm(x, n) + delta, c) * std::pow(factor_norm(y, m) + delta, d);
}

WeightPair PowerWeightFamily::sample(const ProductGrid& grid) const {
    PowerWeightFamily fam = *this;
    if (!(fam.delta > 0.0)) fam.delta = grid.step(Factor::kFirst);
    return fam.sample_composed(grid, 1.0, 1.0);
}

WeightPair PowerWeightFamily::sample_composed(const ProductGrid& grid, double scale_x,
                                              double scale_y) const {
    if (!(delta > 0.0)) throw InvalidArgument("power weights: delta must be positive");
    const int n = grid.n();
    const int m = grid.m();
    auto scaled = [](FactorPoint p, double s) {
        for (double& v : p) v *= s;
        return p;
    };
    auto om = GridFunction::from_function(grid, [&](const FactorPoint& x, const FactorPoint& y) {
        return omega(scaled(x, scale_x), n, scaled(y, scale_y), m);
    });
    auto sg = GridFunction::from_function(grid, [&](const FactorPoint& x, const FactorPoint& y) {
        return sigma(scaled(x, scale_x), n, scaled(y, scale_y), m);
    });
    return WeightPair(std::move(om), std::move(sg));
}

}  // namespace mfi
