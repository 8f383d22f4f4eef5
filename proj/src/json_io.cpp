#include "isonorm/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace isonorm {

namespace {

const nlohmann::json& need(const nlohmann::json& j, const char* key, const char* what)
{
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(what) + ": missing field '" + key + "'");
    return *it;
}

Json mat_to(const Mat& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Accepts nested rows [[..],[..]] or a flat row-major list when both
// dimensions are known from context (cols > 0).
Mat mat_from(const nlohmann::json& j, const char* what, Eigen::Index cols_hint)
{
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(std::string(what) + ": expected a non-empty array");
    if (j.front().is_array()) {
        const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
        const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto& row = j[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
                throw std::invalid_argument(std::string(what) + ": ragged matrix rows");
            for (Eigen::Index k = 0; k < cols; ++k)
                m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
        return m;
    }
    if (cols_hint < 1 || static_cast<Eigen::Index>(j.size()) % cols_hint != 0)
        throw std::invalid_argument(std::string(what)
                                    + ": flat matrix length does not match the dimension");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size()) / cols_hint;
    Mat m(rows, cols_hint);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols_hint; ++k)
            m(i, k) = j[static_cast<std::size_t>(i * cols_hint + k)].get<double>();
    return m;
}

Vec vec_from(const nlohmann::json& j, const char* what)
{
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(std::string(what) + ": expected a non-empty array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

Json vec_to(const Vec& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

struct BodyWriter {
    Json operator()(const Body::BallSpec& s) const
    {
        return Json{{"type", "ball"}, {"radius", s.radius}};
    }
    Json operator()(const Body::PBallSpec& s) const
    {
        Json j{{"type", "pball"}};
        if (std::isinf(s.p))
            j["p"] = "inf";
        else
            j["p"] = s.p;
        j["radius"] = s.radius;
        return j;
    }
    Json operator()(const Body::CubeSpec& s) const
    {
        return Json{{"type", "cube"}, {"half_width", s.half_width}};
    }
    Json operator()(const Body::PolytopeSpec& s) const
    {
        return Json{{"type", "polytope"}, {"A", mat_to(s.A)}, {"b", vec_to(s.b)}};
    }
    Json operator()(const Body::EllipsoidSpec& s) const
    {
        return Json{{"type", "ellipsoid"}, {"M", mat_to(s.M)}};
    }
    Json operator()(const Body::LinearImageSpec& s) const
    {
        return Json{{"type", "linear_image"}, {"T", mat_to(s.T)},
                    {"inner", body_to_json(*s.inner)}};
    }
    Json operator()(const Body::ScaledSpec& s) const
    {
        return Json{{"type", "scaled"}, {"factor", s.c}, {"inner", body_to_json(*s.inner)}};
    }
};

} // namespace

Json body_to_json(const Body& body)
{
    Json j = std::visit(BodyWriter{}, body.spec());
    j["dim"] = body.dim();
    if (body.volume() && !body.volume()->exact) {
        j["volume"] = Json{{"value", body.volume()->value}, {"rel_se", body.volume()->rel_se}};
    }
    if (body.isotropic_flag()) j["isotropic"] = true;
    j["label"] = body.label();
    return j;
}

Body body_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("body: expected a JSON object");
    const std::string type = need(j, "type", "body").get<std::string>();

    Body body = [&]() -> Body {
        if (type == "ball") {
            const int dim = need(j, "dim", "ball").get<int>();
            return Body::euclidean_ball(dim, j.value("radius", 1.0));
        }
        if (type == "pball") {
            const int dim = need(j, "dim", "pball").get<int>();
            const auto& pj = need(j, "p", "pball");
            const double p = pj.is_string() ? std::numeric_limits<double>::infinity()
                                            : pj.get<double>();
            if (pj.is_string() && pj.get<std::string>() != "inf")
                throw std::invalid_argument("pball: p must be a number or \"inf\"");
            return Body::p_ball(dim, p, j.value("radius", 1.0));
        }
        if (type == "cube") {
            const int dim = need(j, "dim", "cube").get<int>();
            return Body::cube(dim, j.value("half_width", 0.5));
        }
        if (type == "polytope") {
            const Vec b = vec_from(need(j, "b", "polytope"), "polytope.b");
            const int dim = j.value("dim", 0);
            Mat A = mat_from(need(j, "A", "polytope"), "polytope.A", dim);
            return Body::polytope(std::move(A), b);
        }
        if (type == "ellipsoid") {
            const int dim = j.value("dim", 0);
            return Body::ellipsoid(mat_from(need(j, "M", "ellipsoid"), "ellipsoid.M", dim));
        }
        if (type == "linear_image") {
            Body inner = body_from_json(need(j, "inner", "linear_image"));
            Mat T = mat_from(need(j, "T", "linear_image"), "linear_image.T", inner.dim());
            return Body::linear_image(std::move(T), inner);
        }
        if (type == "scaled") {
            Body inner = body_from_json(need(j, "inner", "scaled"));
            return Body::scaled(need(j, "factor", "scaled").get<double>(), inner);
        }
        throw std::invalid_argument("body: unknown type '" + type + "'");
    }();

    if (auto it = j.find("volume"); it != j.end()) {
        body = body.with_volume(need(*it, "value", "body.volume").get<double>(),
                                it->value("rel_se", 0.0));
    }
    if (j.value("isotropic", false)) body = body.with_isotropic_flag();
    if (auto it = j.find("label"); it != j.end())
        body = body.with_label(it->get<std::string>());
    return body;
}

namespace {

struct MeasureWriter {
    Json operator()(const MeasureSpec::UniformOnBody& m) const
    {
        return Json{{"type", "uniform"}, {"body", body_to_json(m.body)}};
    }
    Json operator()(const MeasureSpec::StandardGaussian& m) const
    {
        return Json{{"type", "gaussian"}, {"dim", m.dim}};
    }
    Json operator()(const MeasureSpec::WeightedSum& m) const
    {
        return Json{{"type", "weighted_sum"}, {"body", body_to_json(m.body)},
                    {"t", vec_to(m.t)}};
    }
    Json operator()(const MeasureSpec::Rescaled& m) const
    {
        return Json{{"type", "rescaled"}, {"factor", m.factor},
                    {"inner", measure_to_json(*m.inner)}};
    }
};

} // namespace

Json measure_to_json(const MeasureSpec& measure)
{
    return std::visit(MeasureWriter{}, measure.variant());
}

MeasureSpec measure_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("measure: expected a JSON object");
    const std::string type = need(j, "type", "measure").get<std::string>();
    if (type == "uniform")
        return MeasureSpec::uniform_on(body_from_json(need(j, "body", "uniform")));
    if (type == "gaussian")
        return MeasureSpec::gaussian(need(j, "dim", "gaussian").get<int>());
    if (type == "weighted_sum")
        return MeasureSpec::weighted_sum(body_from_json(need(j, "body", "weighted_sum")),
                                         vec_from(need(j, "t", "weighted_sum"), "weighted_sum.t"));
    if (type == "rescaled")
        return MeasureSpec::rescaled(measure_from_json(need(j, "inner", "rescaled")),
                                     need(j, "factor", "rescaled").get<double>());
    throw std::invalid_argument("measure: unknown type '" + type + "'");
}

Json estimate_to_json(const Estimate& est)
{
    return Json{{"value", est.value},
                {"se", est.std_error},
                {"count", est.count},
                {"seed", est.stream.seed},
                {"stream", est.stream.stream_id}};
}

Body body_from_cli(const std::string& text, int dim)
{
    if (!text.empty() && (text.front() == '@' || text.find(".json") != std::string::npos)) {
        const std::string path = text.front() == '@' ? text.substr(1) : text;
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("body file not found: " + path);
        return body_from_json(nlohmann::json::parse(in));
    }
    std::string name = text;
    double param = std::numeric_limits<double>::quiet_NaN();
    if (auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        param = std::stod(text.substr(colon + 1));
    }
    if (dim < 1) throw std::invalid_argument("body '" + name + "': --dim is required");
    if (name == "cube") return Body::cube(dim, std::isnan(param) ? 0.5 : param);
    if (name == "ball" || name == "ball2")
        return Body::euclidean_ball(dim, std::isnan(param) ? 1.0 : param);
    if (name == "ball1") return Body::p_ball(dim, 1.0, std::isnan(param) ? 1.0 : param);
    if (name == "ballinf") return Body::cube(dim, std::isnan(param) ? 1.0 : param);
    if (name == "pball") {
        if (std::isnan(param)) throw std::invalid_argument("pball: use pball:<p>");
        return Body::p_ball(dim, param);
    }
    throw std::invalid_argument(
        "unknown body '" + name
        + "' (try cube, ball2, ball1, ballinf, pball:<p>, or a JSON file path)");
}

} // namespace isonorm
