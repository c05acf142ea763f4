#include "brn/json_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace brn {

using nlohmann::json;

namespace {

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

BallShape ball_from_json(const json& j) {
    return BallShape{vec_from_json(j.at("center")), j.at("radius").get<double>()};
}

}  // namespace

DomainSpec domain_from_json(const json& j) {
    const int n = j.at("dimension").get<int>();
    const json& shape = j.at("shape");
    const std::string type = shape.at("type").get<std::string>();
    DomainSpec spec{Dimension(n), BallShape{Vec::Zero(n), 1.0}};
    if (type == "ball") {
        spec.shape = ball_from_json(shape);
    } else if (type == "disjoint_balls") {
        DisjointBallsShape db;
        for (const auto& b : shape.at("balls")) db.balls.push_back(ball_from_json(b));
        spec.shape = std::move(db);
    } else if (type == "smooth") {
        SmoothShape s;
        s.center = vec_from_json(shape.at("center"));
        s.semi_axes = vec_from_json(shape.at("semi_axes"));
        s.mfs_offset = shape.value("mfs_offset", 2.0);
        s.mfs_sources = shape.value("mfs_sources", 800);
        s.collocation_points = shape.value("collocation_points", 2000);
        s.fit_tolerance = shape.value("fit_tolerance", 1e-4);
        spec.shape = std::move(s);
    } else {
        throw std::invalid_argument("unknown shape type '" + type + "'");
    }
    spec.validate();
    return spec;
}

json domain_to_json(const DomainSpec& spec) {
    json j;
    j["dimension"] = spec.dimension.value();
    if (const auto* b = std::get_if<BallShape>(&spec.shape)) {
        j["shape"] = {{"type", "ball"}, {"center", vec_to_json(b->center)}, {"radius", b->radius}};
    } else if (const auto* db = std::get_if<DisjointBallsShape>(&spec.shape)) {
        json balls = json::array();
        for (const auto& b : db->balls)
            balls.push_back({{"center", vec_to_json(b.center)}, {"radius", b.radius}});
        j["shape"] = {{"type", "disjoint_balls"}, {"balls", std::move(balls)}};
    } else {
        const auto& s = std::get<SmoothShape>(spec.shape);
        j["shape"] = {{"type", "smooth"},
                      {"center", vec_to_json(s.center)},
                      {"semi_axes", vec_to_json(s.semi_axes)},
                      {"mfs_offset", s.mfs_offset},
                      {"mfs_sources", s.mfs_sources},
                      {"collocation_points", s.collocation_points},
                      {"fit_tolerance", s.fit_tolerance}};
    }
    return j;
}

DomainSpec load_domain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open domain file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("domain file '" + path + "': " + e.what());
    }
    return domain_from_json(j);
}

json to_json(const CriticalPoint& cp) {
    json peaks = json::array();
    for (int j = 0; j < cp.config.k(); ++j)
        peaks.push_back({{"point", vec_to_json(cp.config.points[j])},
                         {"scale", cp.config.scales[j]}});
    return json{{"peaks", std::move(peaks)},
                {"psi", cp.psi},
                {"grad_norm", cp.grad_norm},
                {"hessian_eigenvalues", vec_to_json(cp.hessian_eigenvalues)},
                {"morse_index", cp.morse_index},
                {"nondegenerate", cp.nondegenerate},
                {"m_matrix_positive", cp.m_matrix_positive},
                {"m_smallest_eigenvalue", cp.m_smallest_eigenvalue}};
}

json to_json(const CountReport& report) {
    json per_k = json::array();
    for (const auto& pk : report.per_k) {
        json t_set = json::array();
        for (const auto& cp : pk.t_set) t_set.push_back(to_json(cp));
        json excluded = json::array();
        for (const auto& cp : pk.excluded) excluded.push_back(to_json(cp));
        per_k.push_back({{"k", pk.k},
                         {"count", pk.count},
                         {"t_set", std::move(t_set)},
                         {"excluded", std::move(excluded)}});
    }
    return json{{"per_k", std::move(per_k)}, {"k_max", report.k_max}, {"total", report.total}};
}

json to_json(const IdentityResidual& r) {
    return json{{"name", r.name},
                {"numeric_lhs", r.numeric_lhs},
                {"closed_form_rhs", r.closed_form_rhs},
                {"abs_residual", r.abs_residual},
                {"rel_residual", r.rel_residual},
                {"theta_pair_drift", r.theta_pair_drift},
                {"std_error", r.std_error}};
}

json to_json(const BlowupPrediction& pred) {
    json peaks = json::array();
    for (const auto& p : pred.per_peak)
        peaks.push_back({{"location", vec_to_json(p.location)},
                         {"lambda_eps", p.lambda_eps},
                         {"height", p.height}});
    return json{{"epsilon", pred.epsilon},
                {"per_peak", std::move(peaks)},
                {"validity_note", pred.validity_note == BlowupPrediction::Validity::ok
                                      ? "ok"
                                      : "n_equals_5_warning"},
                {"error_order", pred.error_order}};
}

}  // namespace brn
