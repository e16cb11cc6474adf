#include "mfi/characteristic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mfi/error.hpp"
#include "mfi/summation.hpp"

namespace mfi {

namespace {

void check_bump_exponent(const ExponentConfig& cfg, double t) {
    if (!(t > 1.0 && t <= cfg.theta())) {
        throw InvalidArgument("characteristic: t must satisfy 1 < t <= theta");
    }
}

/// omega^{e_omega} and sigma^{-e_sigma} sampled once, integrated per rectangle.
class PoweredWeights {
public:
    PoweredWeights(const WeightPair& w, double e_omega, double e_sigma)
        : grid_(w.grid()),
          omega_(w.grid().size()),
          sigma_inv_(w.grid().size()),
          sigma_zero_(w.grid().size(), 0) {
        const auto om = w.omega().values();
        const auto sg = w.sigma().values();
        for (std::size_t i = 0; i < om.size(); ++i) {
            omega_[i] = std::pow(om[i], e_omega);
            sigma_inv_[i] = sg[i] > 0.0 ? std::pow(sg[i], -e_sigma) : 0.0;
            sigma_zero_[i] = sg[i] == 0.0 ? 1 : 0;
        }
    }

    struct Integrals {
        double omega;
        double sigma_inv;
    };

    [[nodiscard]] Integrals integrate(const DyadicRectangle& r) const {
        const auto xs = cube_cells(grid_, Factor::kFirst, r.q);
        const auto ys = cube_cells(grid_, Factor::kSecond, r.p);
        CompensatedSum wo;
        CompensatedSum si;
        bool trivial = false;
        for (std::size_t x : xs) {
            for (std::size_t y : ys) {
                const std::size_t i = grid_.index(x, y);
                wo += omega_[i];
                si += sigma_inv_[i];
                trivial = trivial || sigma_zero_[i] != 0;
            }
        }
        if (trivial) throw TrivialWeight("characteristic: sigma vanishes inside the rectangle");
        const double vol = grid_.product_cell_volume();
        const Integrals out{wo.value() * vol, si.value() * vol};
        if (!std::isfinite(out.sigma_inv) || !std::isfinite(out.omega)) {
            throw TrivialWeight("characteristic: weight integral overflows");
        }
        return out;
    }

private:
    ProductGrid grid_;
    std::vector<double> omega_;
    std::vector<double> sigma_inv_;
    std::vector<unsigned char> sigma_zero_;
};

struct BumpEvaluator {
    const WeightPair& w;
    const ExponentConfig& cfg;
    double t;
    CharacteristicForm form;
    PoweredWeights powered;

    BumpEvaluator(const WeightPair& w_, const ExponentConfig& cfg_, double t_,
                  CharacteristicForm form_)
        : w(w_),
          cfg(cfg_),
          t(t_),
          form(form_),
          powered(w_,
                  form_ == CharacteristicForm::kProductBump ? cfg_.p() * t_ : cfg_.q() * t_,
                  cfg_.p() * t_ / (cfg_.p() - 1.0)) {}

    [[nodiscard]] double operator()(const DyadicRectangle& r) const {
        const ProductGrid& g = w.grid();
        const double p = cfg.p();
        const double mq = cube_measure(g, Factor::kFirst, r.q);
        const double mp = cube_measure(g, Factor::kSecond, r.p);
        const auto in = powered.integrate(r);
        const double sigma_part = std::pow(in.sigma_inv, (p - 1.0) / (p * t));
        if (form == CharacteristicForm::kProductBump) {
            const double b = std::pow(in.omega, 1.0 / (p * t)) * sigma_part;
            return std::pow(mq, cfg.alpha() / cfg.n() - 1.0 / t) *
                   std::pow(mp, cfg.beta() / cfg.m() - 1.0 / t) * b;
        }
        const double q = cfg.q();
        const double area = mq * mp;
        const double shift = -1.0 / p + 1.0 / q;
        return std::pow(mq, cfg.alpha() / cfg.n() + shift) *
               std::pow(mp, cfg.beta() / cfg.m() + shift) *
               std::pow(in.omega / area, 1.0 / (q * t)) *
               std::pow(in.sigma_inv / area, (p - 1.0) / (p * t));
    }
};

double b_from_integrals(double omega_int, double sigma_int, double p, double t) {
    return std::pow(omega_int, 1.0 / (p * t)) * std::pow(sigma_int, (p - 1.0) / (p * t));
}

}  // namespace

double bump_characteristic_rectangle(const WeightPair& w, const DyadicRectangle& r,
                                     const ExponentConfig& cfg, double t,
                                     CharacteristicForm form) {
    cfg.check_grid(w.grid());
    check_bump_exponent(cfg, t);
    validate_rectangle(w.grid(), r);
    return BumpEvaluator(w, cfg, t, form)(r);
}

double b_quantity(const WeightPair& w, const DyadicRectangle& r, double p, double t) {
    if (!(p > 1.0)) throw InvalidArgument("b quantity: p must exceed 1");
    if (!(t > 1.0)) throw InvalidArgument("b quantity: t must exceed 1");
    validate_rectangle(w.grid(), r);
    const PoweredWeights powered(w, p * t, p * t / (p - 1.0));
    const auto in = powered.integrate(r);
    return b_from_integrals(in.omega, in.sigma_inv, p, t);
}

CharacteristicReport bump_characteristic_sup(const WeightPair& w, const ExponentConfig& cfg,
                                             double t, const RectangleFilter& filter,
                                             bool keep_table, CharacteristicForm form) {
    cfg.check_grid(w.grid());
    check_bump_exponent(cfg, t);
    const auto family = enumerate_dyadic_rectangles(w.grid(), filter);
    if (family.empty()) {
        throw EmptyFamily("characteristic: no lattice rectangle matches the filter");
    }
    const BumpEvaluator eval(w, cfg, t, form);
    CharacteristicReport report;
    report.family_size = family.size();
    report.filter = filter;
    report.t = t;
    if (keep_table) report.per_rectangle_values.emplace().reserve(family.size());
    bool first = true;
    for (const auto& r : family) {
        const double v = eval(r);
        if (keep_table) report.per_rectangle_values->push_back({r, v});
        if (first || v > report.value) {
            report.value = v;
            report.argmax = r;
            first = false;
        }
    }
    return report;
}

BRatioProbe b_ratio_probe(const WeightPair& w, const DyadicRectangle& r,
                          const ExponentConfig& cfg, double t, int ell, double slack) {
    cfg.check_grid(w.grid());
    const DyadicRectangle shrunk = dilate_rectangle(w.grid(), r, ell, Factor::kFirst);
    const double denom = b_quantity(w, r, cfg.p(), t);
    if (!(denom > 0.0)) {
        throw TrivialWeight("b ratio: B vanishes on the parent rectangle");
    }
    BRatioProbe out;
    out.ratio = b_quantity(w, shrunk, cfg.p(), t) / denom;
    out.bound = std::exp2(ell * (cfg.alpha() - cfg.n() / t));
    out.holds = out.ratio <= slack * out.bound;
    return out;
}

}  // namespace mfi
