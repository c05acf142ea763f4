// brnctl: batch command-line front end for the reduced-energy toolkit.
//
// Every command reads a domain description from JSON, runs one computation,
// and emits a JSON report with a fixed envelope:
//   { version, command, seed, timestamp, inputs, output }
// Reports are byte-identical across runs with the same configuration and
// seed, apart from the timestamp. Grid-valued commands additionally write a
// CSV next to the JSON sidecar.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// failure (boundary fit above tolerance, or an --expect count not met).

#include "CLI11.hpp"

#include "brn/bubble.hpp"
#include "brn/critical.hpp"
#include "brn/green.hpp"
#include "brn/json_io.hpp"
#include "brn/pohozaev.hpp"
#include "brn/predictor.hpp"
#include "brn/psi.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using brn::Vec;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Thrown when an explicit --expect requirement is not met.
struct ExpectationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Vec parse_vec(const std::string& s) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size())
            throw std::invalid_argument("bad number '" + tok + "' in vector '" + s + "'");
        vals.push_back(v);
    }
    if (vals.empty()) throw std::invalid_argument("empty vector '" + s + "'");
    Vec v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Common {
    std::string domain_file;
    std::uint64_t seed = 20240817;
    std::string report_path;  // empty: stdout

    void add_to(CLI::App* cmd) {
        cmd->add_option("--domain", domain_file, "domain description JSON file")
            ->required();
        cmd->add_option("--seed", seed, "seed for all randomized stages");
        cmd->add_option("--report", report_path, "report JSON path (default: stdout)");
    }

    void emit(const std::string& command, json inputs, json output) const {
        inputs["domain_file"] = domain_file;
        json report{{"version", kVersion},
                    {"command", command},
                    {"seed", seed},
                    {"timestamp", utc_timestamp()},
                    {"inputs", std::move(inputs)},
                    {"output", std::move(output)}};
        if (report_path.empty()) {
            std::cout << report.dump(2) << "\n";
        } else {
            std::ofstream out(report_path);
            if (!out) throw std::invalid_argument("cannot write report '" + report_path + "'");
            out << report.dump(2) << "\n";
        }
    }
};

brn::SearchConfig search_config(const Common& c, int starts) {
    brn::SearchConfig cfg;
    cfg.seed = c.seed;
    if (starts > 0) cfg.starts = starts;
    return cfg;
}

// ---------------------------------------------------------------- commands

int cmd_green_eval(const Common& c, const std::string& pole_s, const std::string& field_s) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const Vec x = parse_vec(pole_s);
    json out;
    const auto robin = g->robin(x);
    out["robin"] = {{"value", robin.value},
                    {"gradient", vec_json(robin.gradient)},
                    {"near_boundary", robin.near_boundary}};
    out["fit_residual"] = g->fit_residual(x);
    if (!field_s.empty()) {
        const Vec y = parse_vec(field_s);
        out["green"] = g->green(x, y);
        out["h_value"] = g->h_value(x, y);
        out["grad_y_green"] = vec_json(g->grad_y_green(x, y));
    }
    c.emit("green-eval",
           {{"domain", brn::domain_to_json(spec)}, {"pole", pole_s}, {"field", field_s}},
           std::move(out));
    return 0;
}

int cmd_robin_map(const Common& c, int grid, const std::string& csv_path) {
    if (grid < 2) throw std::invalid_argument("--grid must be >= 2");
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const int n = g->dim();

    std::ofstream csv(csv_path);
    if (!csv) throw std::invalid_argument("cannot write CSV '" + csv_path + "'");
    csv << "ray,step";
    for (int i = 0; i < n; ++i) csv << ",x" << i;
    csv << ",robin,near_boundary\n";
    csv.precision(17);

    // radial grid: for each signed coordinate axis, march from each component
    // center toward the boundary, stopping at 90% of the exit distance
    Vec lo(n), hi(n);
    spec.bounding_box(lo, hi);
    int rows = 0;
    double min_value = std::numeric_limits<double>::infinity();
    Vec min_point = Vec::Zero(n);
    for (int comp = 0; comp < spec.component_count(); ++comp) {
        // component center: bisect along x0 is unnecessary; all supported
        // shapes expose centered components through their spec
        Vec center = Vec::Zero(n);
        if (const auto* db = std::get_if<brn::DisjointBallsShape>(&spec.shape))
            center = db->balls[comp].center;
        else if (const auto* b = std::get_if<brn::BallShape>(&spec.shape))
            center = b->center;
        else
            center = std::get<brn::SmoothShape>(spec.shape).center;
        for (int axis = 0; axis < 2 * n; ++axis) {
            Vec dir = Vec::Zero(n);
            dir[axis / 2] = (axis % 2 == 0) ? 1.0 : -1.0;
            // exit distance along the ray by bisection on containment
            double in = 0.0, out = (hi - lo).norm();
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (in + out);
                (spec.contains(center + mid * dir) ? in : out) = mid;
            }
            for (int s = 0; s < grid; ++s) {
                const double r = 0.9 * in * s / (grid - 1);
                const Vec x = center + r * dir;
                const auto robin = g->robin(x);
                csv << comp * 2 * n + axis << "," << s;
                for (int i = 0; i < n; ++i) csv << "," << x[i];
                csv << "," << robin.value << "," << (robin.near_boundary ? 1 : 0) << "\n";
                ++rows;
                if (robin.value < min_value) {
                    min_value = robin.value;
                    min_point = x;
                }
            }
        }
    }
    c.emit("robin-map", {{"domain", brn::domain_to_json(spec)}, {"grid", grid}},
           {{"csv", csv_path},
            {"rows", rows},
            {"min", {{"value", min_value}, {"location", vec_json(min_point)}}}});
    return 0;
}

int cmd_psi_eval(const Common& c, const std::string& points_s, const std::string& scales_s) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const auto consts = brn::UniversalConstants::for_dimension(spec.dimension);

    brn::PeakConfig cfg;
    std::stringstream ss(points_s);
    std::string tok;
    while (std::getline(ss, tok, ';')) cfg.points.push_back(parse_vec(tok));
    cfg.scales = parse_vec(scales_s);
    if (static_cast<int>(cfg.points.size()) != cfg.scales.size())
        throw std::invalid_argument("--points and --scales disagree on the peak count");
    cfg.validate();

    std::vector<Vec> pts = cfg.points;
    const auto m = brn::m_matrix(*g, pts);
    const Vec grad = brn::psi_grad(*g, cfg, consts);
    c.emit("psi-eval",
           {{"domain", brn::domain_to_json(spec)}, {"points", points_s}, {"scales", scales_s}},
           {{"psi", brn::psi_value(*g, cfg, consts)},
            {"grad", vec_json(grad)},
            {"grad_norm", grad.norm()},
            {"m_smallest_eigenvalue", m.smallest_eigenvalue},
            {"m_positive", brn::is_positive(m)}});
    return 0;
}

int cmd_find_critical(const Common& c, int k, int starts, int expect) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const auto consts = brn::UniversalConstants::for_dimension(spec.dimension);
    const auto cfg = search_config(c, starts);
    const auto points = brn::find_critical(*g, k, cfg, consts);

    json arr = json::array();
    for (const auto& cp : points) arr.push_back(brn::to_json(cp));
    c.emit("find-critical",
           {{"domain", brn::domain_to_json(spec)}, {"k", k}, {"starts", cfg.starts},
            {"expect", expect}},
           {{"critical_points", std::move(arr)}, {"found", static_cast<int>(points.size())}});
    if (expect >= 0 && static_cast<int>(points.size()) != expect)
        throw ExpectationError("expected " + std::to_string(expect) + " critical points, found " +
                               std::to_string(points.size()));
    return 0;
}

int cmd_count(const Common& c, int k_max, int starts) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const auto consts = brn::UniversalConstants::for_dimension(spec.dimension);
    const auto report = brn::count_solutions(*g, k_max, search_config(c, starts), consts);
    c.emit("count",
           {{"domain", brn::domain_to_json(spec)}, {"k_max", k_max}},
           brn::to_json(report));
    return 0;
}

int cmd_pohozaev_verify(const Common& c, const std::string& pole_s, long samples, int product,
                        double radius) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const Vec pole = parse_vec(pole_s);

    brn::SphereQuadrature q{pole, radius, brn::MonteCarloScheme{samples, c.seed}};
    if (product > 0) q.scheme = brn::ProductScheme{product};
    const auto residuals = brn::verify_identities(*g, {pole}, q);

    json arr = json::array();
    double worst = 0.0;
    for (const auto& r : residuals) {
        arr.push_back(brn::to_json(r));
        worst = std::max(worst, r.rel_residual);
    }
    c.emit("pohozaev-verify",
           {{"domain", brn::domain_to_json(spec)},
            {"pole", pole_s},
            {"samples", samples},
            {"product_points", product},
            {"radius", radius}},
           {{"residuals", std::move(arr)}, {"worst_rel_residual", worst}});
    return 0;
}

int cmd_predict(const Common& c, int k, int starts, std::vector<double> epsilons) {
    const auto spec = brn::load_domain(c.domain_file);
    const auto g = brn::make_provider(spec);
    const auto consts = brn::UniversalConstants::for_dimension(spec.dimension);
    const auto points = brn::find_critical(*g, k, search_config(c, starts), consts);
    if (points.empty())
        throw ExpectationError("no critical point found for k=" + std::to_string(k) +
                               "; nothing to predict from");
    if (epsilons.empty()) epsilons = {1e-3};

    json preds = json::array();
    for (double eps : epsilons)
        preds.push_back(brn::to_json(brn::predict(points.front(), eps, spec.dimension)));
    c.emit("predict",
           {{"domain", brn::domain_to_json(spec)}, {"k", k}, {"epsilon", epsilons}},
           {{"critical_point", brn::to_json(points.front())},
            {"predictions", std::move(preds)}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced-energy toolkit: Green/Robin evaluation, critical-point search,\n"
                 "surface-identity verification, and blow-up prediction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct {
        Common common;
        std::string pole, field, points, scales, csv = "robin_map.csv";
        int grid = 17, k = 1, k_max = 2, starts = 0, expect = -1, product = 0;
        long samples = 100000;
        double radius = 0.25;
        std::vector<double> epsilons;
    } o;

    auto* green = app.add_subcommand("green-eval", "Robin value/gradient at a pole, optionally "
                                                   "the Green function against a field point");
    o.common.add_to(green);
    green->add_option("--pole", o.pole, "pole, comma-separated coordinates")->required();
    green->add_option("--field", o.field, "optional field point");

    auto* rmap = app.add_subcommand("robin-map", "CSV of the Robin function on a radial grid");
    o.common.add_to(rmap);
    rmap->add_option("--grid", o.grid, "points per ray");
    rmap->add_option("--output", o.csv, "CSV output path");

    auto* psi = app.add_subcommand("psi-eval", "reduced energy at a peak configuration");
    o.common.add_to(psi);
    psi->add_option("--points", o.points, "semicolon-separated peak points")->required();
    psi->add_option("--scales", o.scales, "comma-separated peak scales")->required();

    auto* findc = app.add_subcommand("find-critical", "multistart search for critical points");
    o.common.add_to(findc);
    findc->add_option("--k", o.k, "number of peaks");
    findc->add_option("--starts", o.starts, "multistart count (0: default)");
    findc->add_option("--expect", o.expect,
                      "exact expected count; mismatch exits with status 3");

    auto* count = app.add_subcommand("count", "solution counts for k = 1..k_max");
    o.common.add_to(count);
    count->add_option("--k-max", o.k_max, "largest peak count");
    count->add_option("--starts", o.starts, "multistart count (0: default)");

    auto* poh = app.add_subcommand("pohozaev-verify",
                                   "surface-identity residuals around a pole");
    o.common.add_to(poh);
    poh->add_option("--pole", o.pole, "pole, comma-separated coordinates")->required();
    poh->add_option("--samples", o.samples, "Monte Carlo sample count");
    poh->add_option("--product-points", o.product,
                    "use the deterministic product rule with this many points per angle");
    poh->add_option("--radius", o.radius, "quadrature sphere radius");

    auto* pred = app.add_subcommand("predict", "blow-up prediction from the best critical point");
    o.common.add_to(pred);
    pred->add_option("--k", o.k, "number of peaks");
    pred->add_option("--starts", o.starts, "multistart count (0: default)");
    pred->add_option("--epsilon", o.epsilons, "one or more epsilon values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (green->parsed()) return cmd_green_eval(o.common, o.pole, o.field);
        if (rmap->parsed()) return cmd_robin_map(o.common, o.grid, o.csv);
        if (psi->parsed()) return cmd_psi_eval(o.common, o.points, o.scales);
        if (findc->parsed()) return cmd_find_critical(o.common, o.k, o.starts, o.expect);
        if (count->parsed()) return cmd_count(o.common, o.k_max, o.starts);
        if (poh->parsed())
            return cmd_pohozaev_verify(o.common, o.pole, o.samples, o.product, o.radius);
        if (pred->parsed()) return cmd_predict(o.common, o.k, o.starts, o.epsilons);
    } catch (const brn::FitError& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (boundary residual " << e.boundary_residual << ")\n";
        return 3;
    } catch (const ExpectationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const brn::SingularityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const brn::InconsistentBasePointsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable with require_subcommand(1)
}
