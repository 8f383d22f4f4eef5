#include "isonorm/experiments.hpp"
#include "isonorm/functionals.hpp"
#include "isonorm/isotropy.hpp"
#include "isonorm/json_io.hpp"
#include "isonorm/multinorm.hpp"
#include "isonorm/positioning.hpp"
#include "isonorm/samplers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace isonorm;

namespace {

RngKey key_of(std::uint64_t seed, std::uint64_t stream)
{
    return RngKey{seed, stream};
}

py::dict estimate_dict(const Estimate& est)
{
    py::dict d;
    d["value"] = est.value;
    d["se"] = est.std_error;
    d["count"] = est.count;
    d["seed"] = est.stream.seed;
    d["stream"] = est.stream.stream_id;
    return d;
}

} // namespace

PYBIND11_MODULE(_isonorm, m)
{
    m.doc() = "numerical laboratory for the multi-integral norm";

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("se", &Estimate::std_error)
        .def_readonly("count", &Estimate::count)
        .def("to_dict", &estimate_dict)
        .def("__repr__", [](const Estimate& e) {
            return "Estimate(value=" + std::to_string(e.value)
                   + ", se=" + std::to_string(e.std_error) + ")";
        });

    py::class_<Body>(m, "Body")
        .def_static("ball", &Body::euclidean_ball, py::arg("dim"), py::arg("radius") = 1.0)
        .def_static("p_ball", &Body::p_ball, py::arg("dim"), py::arg("p"),
                    py::arg("radius") = 1.0)
        .def_static("cube", &Body::cube, py::arg("dim"), py::arg("half_width") = 0.5)
        .def_static("polytope", &Body::polytope, py::arg("A"), py::arg("b"))
        .def_static("ellipsoid", &Body::ellipsoid, py::arg("M"))
        .def_static("linear_image", &Body::linear_image, py::arg("T"), py::arg("inner"))
        .def_static("scaled", &Body::scaled, py::arg("c"), py::arg("inner"))
        .def_static("from_json",
                    [](const std::string& text) {
                        return body_from_json(nlohmann::json::parse(text));
                    })
        .def("to_json", [](const Body& b) { return body_to_json(b).dump(); })
        .def_property_readonly("dim", &Body::dim)
        .def_property_readonly("label", &Body::label)
        .def_property_readonly("isotropic", &Body::isotropic_flag)
        .def("gauge", &Body::gauge)
        .def("support", &Body::support)
        .def("contains", &Body::contains, py::arg("x"), py::arg("tol") = 1e-12)
        .def("normalize_volume", &Body::normalize_volume)
        .def("with_isotropic_flag", &Body::with_isotropic_flag, py::arg("flag") = true)
        .def("__repr__", [](const Body& b) { return "Body(" + b.label() + ")"; });

    m.def(
        "sample_uniform",
        [](const Body& body, std::int64_t count, std::uint64_t seed, std::uint64_t stream) {
            return sample_measure(MeasureSpec::uniform_on(body), count, key_of(seed, stream))
                .points;
        },
        py::arg("body"), py::arg("count"), py::arg("seed") = 1, py::arg("stream") = 0);
    m.def(
        "sample_nu_t",
        [](const Body& c_iso, const Vec& t, std::int64_t count, std::uint64_t seed,
           std::uint64_t stream) {
            return sample_nu_t(c_iso, t, count, key_of(seed, stream)).points;
        },
        py::arg("c_iso"), py::arg("t"), py::arg("count"), py::arg("seed") = 1,
        py::arg("stream") = 0);

    m.def(
        "big_m",
        [](const Body& k, std::int64_t count, std::uint64_t seed) {
            return big_m(k, key_of(seed, 0), count);
        },
        py::arg("k"), py::arg("count") = 200000, py::arg("seed") = 1);
    m.def(
        "mean_width",
        [](const Body& k, std::int64_t count, std::uint64_t seed) {
            return mean_width(k, key_of(seed, 0), count);
        },
        py::arg("k"), py::arg("count") = 200000, py::arg("seed") = 1);
    m.def(
        "vrad",
        [](const Body& k, std::int64_t count, std::uint64_t seed) {
            const auto rep = vrad(k, key_of(seed, 0), count);
            py::dict d;
            if (rep.volume_route) d["volume_route"] = estimate_dict(*rep.volume_route);
            d["polar_route"] = estimate_dict(rep.polar_route);
            d["authoritative"] = rep.authoritative;
            d["unstable"] = rep.unstable;
            d["value"] = rep.value().value;
            return d;
        },
        py::arg("k"), py::arg("count") = 200000, py::arg("seed") = 1);
    m.def(
        "isotropic_constant",
        [](const Body& body, std::int64_t budget, std::uint64_t seed) {
            return isotropic_constant(body, key_of(seed, 0), budget);
        },
        py::arg("body"), py::arg("budget") = 0, py::arg("seed") = 1);
    m.def(
        "i1_uniform",
        [](const Body& c, const Body& k, std::int64_t count, std::uint64_t seed) {
            return i1(MeasureSpec::uniform_on(c), k, key_of(seed, 0), count);
        },
        py::arg("c"), py::arg("k"), py::arg("count") = 200000, py::arg("seed") = 1);

    py::class_<MultiNormContext>(m, "MultiNormContext")
        .def_property_readonly("l", [](const MultiNormContext& c) { return c.l; })
        .def_property_readonly("c_body", [](const MultiNormContext& c) { return c.c; })
        .def_property_readonly("k_body", [](const MultiNormContext& c) { return c.k; });
    m.def(
        "make_context",
        [](const Body& c, const Body& k, std::uint64_t seed, std::int64_t budget) {
            return make_context(c, k, key_of(seed, 0), budget);
        },
        py::arg("c"), py::arg("k"), py::arg("seed") = 1, py::arg("sample_budget") = 0);
    m.def(
        "multi_norm",
        [](const MultiNormContext& ctx, const Vec& t, std::int64_t count, std::uint64_t seed) {
            return multi_norm(ctx, t, key_of(seed, 1), count);
        },
        py::arg("ctx"), py::arg("t"), py::arg("count") = 100000, py::arg("seed") = 1);
    m.def(
        "identity_gap",
        [](const MultiNormContext& ctx, const Vec& t, std::int64_t count, std::uint64_t seed) {
            const auto rep = identity_check(ctx, t, key_of(seed, 2), count);
            py::dict d;
            d["lhs"] = estimate_dict(rep.lhs);
            d["rhs"] = estimate_dict(rep.rhs);
            d["gap_se_units"] = rep.gap_se_units;
            return d;
        },
        py::arg("ctx"), py::arg("t"), py::arg("count") = 100000, py::arg("seed") = 1);

    m.def(
        "optimize_position",
        [](const Body& c, const Body& k, std::uint64_t seed, std::int64_t budget, int restarts,
           std::int64_t crn_batch) {
            const auto rep = optimize_position(c, k, key_of(seed, 0), budget, restarts,
                                               crn_batch);
            py::dict d;
            d["t_star"] = rep.t_star;
            d["objective"] = estimate_dict(rep.objective);
            d["ratio"] = rep.ratio;
            d["det"] = rep.det_t;
            d["converged"] = rep.converged;
            d["trace"] = rep.trace;
            return d;
        },
        py::arg("c"), py::arg("k"), py::arg("seed") = 1, py::arg("budget") = 1600,
        py::arg("restarts") = 8, py::arg("crn_batch") = 10000);

    m.def("run_experiment", &run_experiment, py::arg("config_path"),
          "run an experiment config; returns the process exit code");
    m.def("registry", [] {
        py::list out;
        for (const auto& e : registry_list()) {
            py::dict d;
            d["name"] = e.name;
            d["anchor"] = e.anchor;
            d["summary"] = e.summary;
            out.append(d);
        }
        return out;
    });
}
