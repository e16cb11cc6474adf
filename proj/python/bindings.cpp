#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfi/acceptance.hpp"
#include "mfi/characteristic.hpp"
#include "mfi/error.hpp"
#include "mfi/grid.hpp"
#include "mfi/operator.hpp"
#include "mfi/parallel.hpp"
#include "mfi/verify.hpp"
#include "mfi/weights.hpp"

namespace py = pybind11;
using namespace mfi;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Grid functions cross the boundary as (first-factor cells, second-factor cells) arrays.
GridFunction to_function(const ProductGrid& grid, const Array& a) {
    const auto rows = grid.factor_cells(Factor::kFirst);
    const auto cols = grid.factor_cells(Factor::kSecond);
    if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != rows ||
        static_cast<std::size_t>(a.shape(1)) != cols) {
        throw InvalidArgument("array shape must be (" + std::to_string(rows) + ", " +
                              std::to_string(cols) + ")");
    }
    return GridFunction(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const GridFunction& f) {
    const auto& g = f.grid();
    Array out({g.factor_cells(Factor::kFirst), g.factor_cells(Factor::kSecond)});
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

RectangleFilter make_filter(const py::object& ell, bool diagonal) {
    if (diagonal) return RectangleFilter::diagonal();
    if (ell.is_none()) return RectangleFilter::all();
    return RectangleFilter::with_eccentricity(ell.cast<int>());
}

py::dict operator_dict(const OperatorOutput& out) {
    py::dict d;
    d["result"] = to_array(out.result);
    d["excluded"] = to_array(out.excluded);
    d["residual"] = to_array(out.residual);
    d["excluded_mass"] = out.excluded_mass;
    if (out.ell_range_used) {
        d["ell_range_used"] = py::make_tuple(out.ell_range_used->min, out.ell_range_used->max);
    } else {
        d["ell_range_used"] = py::none();
    }
    return d;
}

py::dict rectangle_dict(const DyadicRectangle& r, const ProductGrid& g) {
    py::dict d;
    auto corner = [](const Cube& c, int dim) {
        py::list l;
        for (int k = 0; k < dim; ++k) l.append(c.corner[k]);
        return py::tuple(l);
    };
    d["q_corner"] = corner(r.q, g.n());
    d["q_side"] = r.q.side;
    d["p_corner"] = corner(r.p, g.m());
    d["p_side"] = r.p.side;
    d["eccentricity"] = eccentricity_value(g, r);
    return d;
}

py::dict decay_dict(const DecayReport& r) {
    py::dict d;
    d["kind"] = r.kind == QuantityKind::kCharacteristic ? "CHARACTERISTIC" : "NORM_RATIO";
    d["ell_values"] = r.ell_values;
    d["quantities"] = r.quantities;
    d["fitted_epsilon"] = r.fitted_epsilon;
    d["fit_residual"] = r.fit_residual;
    d["dropped_ells"] = r.dropped_ells;
    return d;
}

DecayReport decay_from(const std::vector<int>& ells, const std::vector<double>& q) {
    if (ells.size() != q.size()) throw InvalidArgument("ell_values and quantities differ in length");
    DecayReport r;
    r.ell_values = ells;
    r.quantities = q;
    return r;
}

}  // namespace

PYBIND11_MODULE(_mfi, mod) {
    mod.doc() = "Strong fractional integrals and bump characteristics on product grids";

    auto error = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(mod, "InvalidArgument", error.ptr());
    py::register_exception<TrivialWeight>(mod, "TrivialWeight", error.ptr());
    py::register_exception<GuardExceeded>(mod, "GuardExceeded", error.ptr());
    py::register_exception<EmptyFamily>(mod, "EmptyFamily", error.ptr());

    py::class_<ProductGrid>(mod, "Grid")
        .def(py::init(&make_grid), py::arg("n"), py::arg("m"), py::arg("extent_x"),
             py::arg("extent_y"), py::arg("cells_x"), py::arg("cells_y"))
        .def_property_readonly("n", &ProductGrid::n)
        .def_property_readonly("m", &ProductGrid::m)
        .def_property_readonly("shape", [](const ProductGrid& g) {
            return py::make_tuple(g.factor_cells(Factor::kFirst), g.factor_cells(Factor::kSecond));
        })
        .def_property_readonly("size", &ProductGrid::size)
        .def_property_readonly("steps", [](const ProductGrid& g) {
            return py::make_tuple(g.step(Factor::kFirst), g.step(Factor::kSecond));
        })
        .def("centers", [](const ProductGrid& g, int factor) {
            const Factor f = factor == 0 ? Factor::kFirst : Factor::kSecond;
            const auto count = g.factor_cells(f);
            const int dim = g.dim(f);
            Array out({count, static_cast<std::size_t>(dim)});
            auto* p = out.mutable_data();
            for (std::size_t i = 0; i < count; ++i) {
                const auto c = g.center(f, i);
                for (int k = 0; k < dim; ++k) *p++ = c[k];
            }
            return out;
        }, py::arg("factor"));

    py::class_<ExponentConfig>(mod, "Exponents")
        .def(py::init([](int n, int m, double alpha, double beta, double p, std::optional<double> q,
                         double theta) {
                 return ExponentConfig(n, m, alpha, beta, p, q.value_or(p), theta);
             }),
             py::arg("n"), py::arg("m"), py::arg("alpha"), py::arg("beta"), py::arg("p"),
             py::arg("q") = py::none(), py::arg("theta"))
        .def_property_readonly("alpha", &ExponentConfig::alpha)
        .def_property_readonly("beta", &ExponentConfig::beta)
        .def_property_readonly("p", &ExponentConfig::p)
        .def_property_readonly("q", &ExponentConfig::q)
        .def_property_readonly("theta", &ExponentConfig::theta);

    py::class_<WeightPair>(mod, "Weights")
        .def(py::init([](const ProductGrid& g, const Array& omega, const Array& sigma) {
                 return WeightPair(to_function(g, omega), to_function(g, sigma));
             }),
             py::arg("grid"), py::arg("omega"), py::arg("sigma"))
        .def_static("unit", &unit_weights, py::arg("grid"))
        .def_static("power", [](const ProductGrid& g, double a, double b, double c, double d,
                                double delta) { return PowerWeightFamily{a, b, c, d, delta}.sample(g); },
                    py::arg("grid"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
                    py::arg("delta") = 0.0)
        .def_property_readonly("omega", [](const WeightPair& w) { return to_array(w.omega()); })
        .def_property_readonly("sigma", [](const WeightPair& w) { return to_array(w.sigma()); });

    mod.def("set_threads", &set_thread_count, py::arg("threads"));

    mod.def("strong_fractional_integral",
            [](const ProductGrid& g, const Array& f, const ExponentConfig& cfg, bool direct) {
                const auto fn = to_function(g, f);
                std::optional<OperatorOutput> out;
                {
                    py::gil_scoped_release release;
                    out = direct ? strong_fractional_integral_direct(fn, cfg)
                                 : strong_fractional_integral(fn, cfg);
                }
                return to_array(out->result);
            },
            py::arg("grid"), py::arg("f"), py::arg("exponents"), py::arg("direct") = false);

    mod.def("cone_operator",
            [](const ProductGrid& g, const Array& f, const ExponentConfig& cfg, int ell) {
                return operator_dict(cone_operator(to_function(g, f), cfg, ell));
            },
            py::arg("grid"), py::arg("f"), py::arg("exponents"), py::arg("ell"));

    mod.def("cone_sum",
            [](const ProductGrid& g, const Array& f, const ExponentConfig& cfg, int lo, int hi) {
                return operator_dict(cone_sum(to_function(g, f), cfg, lo, hi));
            },
            py::arg("grid"), py::arg("f"), py::arg("exponents"), py::arg("ell_min"),
            py::arg("ell_max"));

    mod.def("achievable_cone_range", [](const ProductGrid& g) {
        const auto r = achievable_cone_range(g);
        return py::make_tuple(r.min, r.max);
    }, py::arg("grid"));

    mod.def("bump_characteristic",
            [](const WeightPair& w, const ExponentConfig& cfg, double t, py::object ell,
               bool diagonal, bool averaged) {
                const auto form = averaged ? CharacteristicForm::kAveragedPQ
                                           : CharacteristicForm::kProductBump;
                const auto rep =
                    bump_characteristic_sup(w, cfg, t, make_filter(ell, diagonal), false, form);
                py::dict d;
                d["value"] = rep.value;
                d["argmax"] = rectangle_dict(rep.argmax, w.grid());
                d["family_size"] = rep.family_size;
                d["t"] = rep.t;
                return d;
            },
            py::arg("weights"), py::arg("exponents"), py::arg("t"), py::arg("ell") = py::none(),
            py::arg("diagonal") = false, py::arg("averaged") = false);

    mod.def("weighted_norm",
            [](const ProductGrid& g, const Array& f, const Array& w, double p) {
                return weighted_norm(to_function(g, f), to_function(g, w), p);
            },
            py::arg("grid"), py::arg("f"), py::arg("weight"), py::arg("p"));

    mod.def("characteristic_decay_profile",
            [](const WeightPair& w, const ExponentConfig& cfg, double t, int lo, int hi) {
                return decay_dict(fit_decay_rate(characteristic_decay_profile(w, cfg, t, {lo, hi})));
            },
            py::arg("weights"), py::arg("exponents"), py::arg("t"), py::arg("ell_min"),
            py::arg("ell_max"));

    mod.def("fit_decay_rate",
            [](const std::vector<int>& ells, const std::vector<double>& q) {
                return decay_dict(fit_decay_rate(decay_from(ells, q)));
            },
            py::arg("ell_values"), py::arg("quantities"));

    mod.def("check_inventory", [] {
        py::list l;
        for (const auto& c : acceptance::inventory()) l.append(py::make_tuple(c.id, c.name, c.description));
        return l;
    });

    mod.def("run_check",
            [](int id, std::uint64_t seed, std::optional<std::string> calibration) {
                acceptance::Context ctx;
                ctx.seed = seed;
                ctx.calibration = acceptance::load_calibration(
                    calibration ? std::filesystem::path(*calibration)
                                : acceptance::default_calibration_path());
                const auto r = acceptance::run_check(id, ctx);
                py::dict d;
                d["id"] = r.id;
                d["name"] = r.name;
                d["passed"] = r.passed;
                d["detail"] = r.detail;
                return d;
            },
            py::arg("id"), py::arg("seed") = 1, py::arg("calibration") = py::none());
}
