#include "isonorm/experiments.hpp"
#include "isonorm/functionals.hpp"
#include "isonorm/isotropy.hpp"
#include "isonorm/json_io.hpp"
#include "isonorm/multinorm.hpp"
#include "isonorm/samplers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace isonorm;

Vec parse_weights(const std::string& text)
{
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    if (vals.empty()) throw std::invalid_argument("--t: expected a comma-separated list");
    Vec t(static_cast<Eigen::Index>(vals.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = vals[static_cast<std::size_t>(i)];
    return t;
}

/// The canonical cube is exactly isotropic (volume 1, covariance I/12); flag
/// it so context construction skips the estimated whitening step.
Body flag_if_exact(Body body)
{
    if (const auto* cube = std::get_if<Body::CubeSpec>(&body.spec());
        cube != nullptr && cube->half_width == 0.5)
        return body.with_isotropic_flag();
    return body;
}

void print_estimate(const std::string& name, const Estimate& est, bool as_json,
                    const std::string& note = {})
{
    if (as_json) {
        Json j;
        j["name"] = name;
        const Json fields = estimate_to_json(est);
        for (const auto& [field, value] : fields.items()) j[field] = value;
        if (!note.empty()) j["note"] = note;
        std::cout << j.dump() << "\n";
        return;
    }
    std::printf("%s = %.6g +- %.2g  [count=%lld seed=%llu stream=%llu]%s%s\n", name.c_str(),
                est.value, est.std_error, static_cast<long long>(est.count),
                static_cast<unsigned long long>(est.stream.seed),
                static_cast<unsigned long long>(est.stream.stream_id),
                note.empty() ? "" : "  ", note.c_str());
}

struct EstimateArgs {
    std::string quantity;
    std::string body = "cube";
    std::string c_body = "cube";
    std::string k_body = "ball2";
    int dim = 3;
    std::string t_text;
    double q = 2.0;
    std::int64_t samples = 200000;
    std::uint64_t seed = 1;
    bool as_json = false;
};

int do_estimate(const EstimateArgs& a)
{
    const RngKey key{a.seed, 0};
    if (a.quantity == "M") {
        print_estimate("M(" + body_from_cli(a.body, a.dim).label() + ")",
                       big_m(body_from_cli(a.body, a.dim), key, a.samples), a.as_json);
        return 0;
    }
    if (a.quantity == "w") {
        const Body body = body_from_cli(a.body, a.dim);
        print_estimate("w(" + body.label() + ")", mean_width(body, key, a.samples), a.as_json);
        return 0;
    }
    if (a.quantity == "vrad") {
        const Body body = body_from_cli(a.body, a.dim);
        const auto rep = vrad(body, key, a.samples);
        print_estimate("vrad(" + body.label() + ")", rep.value(), a.as_json,
                       "route=" + rep.authoritative + (rep.unstable ? " UNSTABLE" : ""));
        return 0;
    }
    if (a.quantity == "volume") {
        const Body body = body_from_cli(a.body, a.dim);
        print_estimate("vol(" + body.label() + ")", estimate_volume(body, key), a.as_json);
        return 0;
    }
    if (a.quantity == "L") {
        const Body body = body_from_cli(a.body, a.dim);
        print_estimate("L(" + body.label() + ")", isotropic_constant(body, key, a.samples),
                       a.as_json);
        return 0;
    }
    if (a.quantity == "i1") {
        const Body cb = body_from_cli(a.c_body, a.dim);
        const Body kb = body_from_cli(a.k_body, a.dim);
        print_estimate("I1(uniform " + cb.label() + ", " + kb.label() + ")",
                       i1(MeasureSpec::uniform_on(cb), kb, key, a.samples), a.as_json);
        return 0;
    }
    if (a.quantity == "multinorm") {
        if (a.t_text.empty()) throw std::invalid_argument("multinorm: --t is required");
        const Vec t = parse_weights(a.t_text);
        const Body cb = flag_if_exact(body_from_cli(a.c_body, a.dim));
        const Body kb = body_from_cli(a.k_body, a.dim);
        auto ctx = make_context(cb, kb, key.derive(1));
        char ltext[48];
        std::snprintf(ltext, sizeof ltext, "L=%.6g", ctx.l.value);
        print_estimate("norm[" + cb.label() + "," + kb.label() + "](t)",
                       multi_norm(ctx, t, key.derive(2), a.samples), a.as_json, ltext);
        return 0;
    }
    if (a.quantity == "thinshell" || a.quantity == "tau") {
        const MeasureSpec measure =
            a.body == "gaussian" ? MeasureSpec::gaussian(a.dim)
                                 : MeasureSpec::uniform_on(body_from_cli(a.body, a.dim));
        const Estimate est = a.quantity == "thinshell"
                                 ? thin_shell_sigma(measure, key, a.samples)
                                 : tau_statistic(measure, key, a.samples);
        print_estimate(a.quantity + "(" + measure.label() + ")", est, a.as_json);
        return 0;
    }
    if (a.quantity == "zq") {
        const Body body = body_from_cli(a.body, a.dim);
        const auto batch = sample_measure(MeasureSpec::uniform_on(body), a.samples, key);
        char qtext[32];
        std::snprintf(qtext, sizeof qtext, "%g", a.q);
        print_estimate("h_Z" + std::string(qtext) + "(e1) on " + body.label(),
                       zq_support(batch, a.q, Vec::Unit(a.dim, 0)), a.as_json);
        return 0;
    }
    std::cerr << "unknown quantity '" << a.quantity
              << "' (try M, w, vrad, volume, L, i1, multinorm, thinshell, tau, zq)\n";
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"isonorm-lab: numerical laboratory for the multi-integral norm"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute an experiment config (JSON)");
    std::string config_path;
    run->add_option("config", config_path, "path to the config file")->required();

    app.add_subcommand("list", "print the experiment registry");

    auto* est = app.add_subcommand("estimate", "one-shot functional estimate");
    EstimateArgs args;
    est->add_option("quantity", args.quantity,
                    "M | w | vrad | volume | L | i1 | multinorm | thinshell | tau | zq")
        ->required();
    est->add_option("--body", args.body, "body name (cube, ball2, ball1, ballinf, pball:<p>, "
                                         "a JSON file path, or 'gaussian' for measures)");
    est->add_option("--C", args.c_body, "body C for i1/multinorm");
    est->add_option("--K", args.k_body, "gauge body K for i1/multinorm");
    est->add_option("--dim", args.dim, "ambient dimension");
    est->add_option("--t", args.t_text, "comma-separated weights for multinorm");
    est->add_option("--q", args.q, "moment order for zq");
    est->add_option("--samples", args.samples, "Monte-Carlo sample count");
    est->add_option("--seed", args.seed, "RNG seed");
    est->add_flag("--json", args.as_json, "emit the estimate as a JSON record");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return isonorm::run_experiment(config_path);
    if (app.get_subcommand("list")->parsed()) {
        for (const auto& entry : isonorm::registry_list())
            std::printf("%-18s %-28s %s\n", entry.name.c_str(), entry.anchor.c_str(),
                        entry.summary.c_str());
        return 0;
    }
    try {
        return do_estimate(args);
    } catch (const std::exception& e) {
        std::cerr << "estimate failed: " << e.what() << "\n";
        return 2;
    }
}
