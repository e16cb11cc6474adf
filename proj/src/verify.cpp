#include "mfi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mfi/error.hpp"
#include "mfi/summation.hpp"

namespace mfi {

namespace {

double unit_interval_open_closed(std::mt19937_64& rng) {
    // 53 random bits mapped to (0, 1]
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return static_cast<std::size_t>(v % n);
}

std::vector<std::size_t> choose_sorted(std::size_t population, std::size_t count,
                                       std::mt19937_64& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), 0);
    if (count >= population) return idx;
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(idx[i], idx[i + uniform_index(rng, population - i)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::string cube_label(const ProductGrid& grid, Factor f, const Cube& c) {
    std::ostringstream s;
    s << "(";
    for (int k = 0; k < grid.dim(f); ++k) s << (k ? "," : "") << c.corner[k];
    s << ";" << c.side << ")";
    return s.str();
}

}  // namespace

double weighted_norm(const GridFunction& g, const GridFunction& w, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("weighted norm: p must be at least 1");
    if (!(g.grid() == w.grid())) throw InvalidArgument("weighted norm: shape mismatch");
    CompensatedSum acc;
    for (std::size_t i = 0; i < g.size(); ++i) acc += std::pow(std::abs(g[i] * w[i]), p);
    return std::pow(acc.value() * g.grid().product_cell_volume(), 1.0 / p);
}

InequalityRatio inequality_ratio(const GridFunction& f, const WeightPair& w,
                                 const ExponentConfig& cfg) {
    InequalityRatio out;
    out.rhs_norm = weighted_norm(f, w.sigma(), cfg.p());
    if (!(out.rhs_norm > 0.0)) throw InvalidArgument("inequality ratio: ||f sigma||_p is zero");
    out.lhs = weighted_norm(strong_fractional_integral(f, cfg).result, w.omega(), cfg.p());
    out.ratio = out.lhs / out.rhs_norm;
    return out;
}

void TestCorpus::append(const TestCorpus& other) {
    functions.insert(functions.end(), other.functions.begin(), other.functions.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

TestCorpus build_corpus(const ProductGrid& grid, CorpusKind kind, std::size_t count,
                        std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("corpus: count must be at least 1");
    std::mt19937_64 rng(seed);
    TestCorpus corpus;
    switch (kind) {
        case CorpusKind::kDyadicIndicators: {
            const auto family = enumerate_dyadic_rectangles(grid, RectangleFilter::all());
            for (std::size_t i : choose_sorted(family.size(), count, rng)) {
                const auto& r = family[i];
                std::vector<double> v(grid.size(), 0.0);
                for_each_cell(grid, r, [&](std::size_t x, std::size_t y) {
                    v[grid.index(x, y)] = 1.0;
                });
                corpus.functions.emplace_back(grid, std::move(v));
                corpus.labels.push_back("dyadic:" + cube_label(grid, Factor::kFirst, r.q) + "x" +
                                        cube_label(grid, Factor::kSecond, r.p));
            }
            break;
        }
        case CorpusKind::kRandom: {
            for (std::size_t k = 0; k < count; ++k) {
                std::vector<double> v(grid.size());
                for (double& x : v) x = unit_interval_open_closed(rng);
                corpus.functions.emplace_back(grid, std::move(v));
                corpus.labels.push_back("random:" + std::to_string(k));
            }
            break;
        }
        case CorpusKind::kSingleCells: {
            for (std::size_t i : choose_sorted(grid.size(), count, rng)) {
                std::vector<double> v(grid.size(), 0.0);
                v[i] = 1.0;
                corpus.functions.emplace_back(grid, std::move(v));
                corpus.labels.push_back("cell:" + std::to_string(i));
            }
            break;
        }
    }
    return corpus;
}

DecayReport cone_norm_profile(const WeightPair& w, const ExponentConfig& cfg, EllRange ell_range,
                              const TestCorpus& corpus) {
    cfg.check_grid(w.grid());
    if (corpus.functions.empty()) throw InvalidArgument("cone norm profile: empty corpus");
    if (ell_range.empty()) throw InvalidArgument("cone norm profile: empty ell range");
    const KernelSpec kernel(cfg.alpha(), cfg.n(), cfg.beta(), cfg.m());
    DecayReport report;
    report.kind = QuantityKind::kNormRatio;
    for (int ell = ell_range.min; ell <= ell_range.max; ++ell) report.ell_values.push_back(ell);
    report.quantities.assign(report.ell_values.size(), 0.0);
    for (const auto& f : corpus.functions) {
        const double denom = weighted_norm(f, w.sigma(), cfg.p());
        if (!(denom > 0.0)) continue;
        const auto d = cone_decomposition(f, kernel, ell_range);
        for (std::size_t k = 0; k < report.ell_values.size(); ++k) {
            const double r = weighted_norm(d.cones[k], w.omega(), cfg.p()) / denom;
            report.quantities[k] = std::max(report.quantities[k], r);
        }
    }
    return report;
}

DecayReport characteristic_decay_profile(const WeightPair& w, const ExponentConfig& cfg,
                                         double t, EllRange ell_range) {
    if (!(t > 1.0 && t < cfg.theta())) {
        throw InvalidArgument("characteristic profile: t must satisfy 1 < t < theta");
    }
    DecayReport report;
    report.kind = QuantityKind::kCharacteristic;
    for (int ell = ell_range.min; ell <= ell_range.max; ++ell) {
        try {
            const auto rep =
                bump_characteristic_sup(w, cfg, t, RectangleFilter::with_eccentricity(ell));
            report.ell_values.push_back(ell);
            report.quantities.push_back(rep.value);
        } catch (const EmptyFamily&) {
            report.dropped_ells.push_back(ell);
        }
    }
    return report;
}

DecayReport fit_decay_rate(DecayReport report) {
    if (report.ell_values.size() != report.quantities.size()) {
        throw InvalidArgument("decay fit: sequences differ in length");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < report.ell_values.size(); ++i) {
        const int ell = report.ell_values[i];
        const double q = report.quantities[i];
        if (ell == 0 || !(q > 0.0)) continue;
        xs.push_back(-std::abs(static_cast<double>(ell)));
        ys.push_back(std::log2(q));
    }
    if (xs.size() < 3) throw InvalidArgument("decay fit: fewer than 3 positive entries");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("decay fit: need at least two distinct |ell|");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (intercept + slope * xs[i]);
        sse += e * e;
    }
    report.fitted_epsilon = slope;
    report.fit_residual = std::sqrt(sse / n);
    return report;
}

DilationLines characteristic_dilation_identity(const PowerWeightFamily& family,
                                               const ProductGrid& grid, const ExponentConfig& cfg,
                                               double t, const DyadicRectangle& r, int ell,
                                               Factor factor) {
    if (!(family.delta > 0.0)) {
        throw InvalidArgument("dilation identity: the weight family needs an explicit delta");
    }
    const ExponentConfig diag(cfg.n(), cfg.m(), cfg.alpha(), cfg.beta(), cfg.p(), cfg.p(),
                              cfg.theta());
    const bool first = factor == Factor::kFirst;
    // weights composed with the dilation, sampled on the original configuration
    const double sx = first ? std::exp2(-ell) : 1.0;
    const double sy = first ? 1.0 : std::exp2(ell);
    const WeightPair composed = family.sample_composed(grid, sx, sy);

    DilationLines lines;
    lines.line1 = bump_characteristic_rectangle(composed, r, diag, t,
                                                CharacteristicForm::kProductBump);
    lines.line2 = bump_characteristic_rectangle(composed, r, diag, t,
                                                CharacteristicForm::kAveragedPQ);

    // the same lattice rectangle on the dilated configuration is the dilated rectangle
    const ProductGrid dilated = grid.scaled(factor, first ? sx : sy);
    const WeightPair direct = family.sample_composed(dilated, 1.0, 1.0);
    const double prefactor =
        first ? std::exp2(cfg.alpha() * ell) : std::exp2(-cfg.beta() * ell);
    lines.line3 = prefactor * bump_characteristic_rectangle(direct, r, diag, t,
                                                            CharacteristicForm::kAveragedPQ);
    return lines;
}

OperatorDilationSides operator_dilation_identity(const AnalyticFunction& f,
                                                 const AnalyticFunction& omega,
                                                 const ProductGrid& grid,
                                                 const ExponentConfig& cfg, int ell) {
    cfg.check_grid(grid);
    const double p = cfg.p();
    OperatorDilationSides sides;
    {
        const auto fg = GridFunction::from_function(grid, f);
        const auto wg = GridFunction::from_function(grid, omega);
        sides.lhs = weighted_norm(cone_operator(fg, cfg, ell).result, wg, p);
    }

    const double s = std::exp2(-ell);
    const ProductGrid big = grid.scaled(Factor::kFirst, std::exp2(ell));
    if (big.size() > kDirectGuardCells) throw GuardExceeded("dilation identity: grid too large");
    auto shrink = [s](FactorPoint x) {
        for (double& v : x) v *= s;
        return x;
    };
    const auto fp = GridFunction::from_function(
        big, [&](const FactorPoint& u, const FactorPoint& v) { return f(shrink(u), v); });
    const auto wp = GridFunction::from_function(
        big, [&](const FactorPoint& x, const FactorPoint& y) { return omega(shrink(x), y); });

    const int n = cfg.n();
    const int m = cfg.m();
    const std::size_t nx = big.factor_cells(Factor::kFirst);
    const std::size_t ny = big.factor_cells(Factor::kSecond);
    const double jac = std::exp2(-ell * n);
    const double measure = jac * big.cell_volume(Factor::kFirst) * big.cell_volume(Factor::kSecond);
    const double hx2 = big.step(Factor::kFirst) * big.step(Factor::kFirst);
    const double hy2 = big.step(Factor::kSecond) * big.step(Factor::kSecond);
    auto offset2 = [&](Factor fac, std::size_t a, std::size_t b) {
        const FactorIndex ia = big.multi_index(fac, a);
        const FactorIndex ib = big.multi_index(fac, b);
        long long d2 = 0;
        for (int k = 0; k < big.dim(fac); ++k) d2 += (ia[k] - ib[k]) * (ia[k] - ib[k]);
        return static_cast<double>(d2);
    };
    CompensatedSum outer;
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
            CompensatedSum inner;
            for (std::size_t u = 0; u < nx; ++u) {
                const double dx2 = offset2(Factor::kFirst, x, u) * hx2;
                for (std::size_t v = 0; v < ny; ++v) {
                    const double dy2 = offset2(Factor::kSecond, y, v) * hy2;
                    const auto cone = cone_index_squared(dx2, dy2);
                    if (!cone || *cone != 0) continue;
                    const double kx = std::pow(s * s * dx2, 0.5 * (cfg.alpha() - n));
                    const double ky = std::pow(dy2, 0.5 * (cfg.beta() - m));
                    inner += fp.at(u, v) * kx * ky;
                }
            }
            const double val = inner.value() * measure;
            outer += std::pow(std::abs(val * wp.at(x, y)), p);
        }
    }
    sides.rhs = std::pow(outer.value() * measure, 1.0 / p);
    return sides;
}

}  // namespace mfi
