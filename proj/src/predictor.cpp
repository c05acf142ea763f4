#include "brn/predictor.hpp"

#include "brn/bubble.hpp"

#include <cmath>
#include <limits>

namespace brn {

namespace {

double near_peak_exclusion(const GreenProvider& g, const BlowupPrediction& pred) {
    double sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pred.per_peak.size(); ++i) {
        sep = std::min(sep, g.spec().boundary_distance(pred.per_peak[i].location));
        for (size_t j = i + 1; j < pred.per_peak.size(); ++j)
            sep = std::min(sep, (pred.per_peak[i].location - pred.per_peak[j].location).norm());
    }
    return 0.1 * sep;
}

}  // namespace

BlowupPrediction predict(const CriticalPoint& cp, double epsilon, Dimension n) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("predict: epsilon must be > 0");
    if (n.value() == 4)
        throw DimensionError("predict: the concentration exponent 1/(n-4) is undefined for n = 4");
    if (!n.reduction_supported())
        throw DimensionError("predict: requires n >= 5");

    BlowupPrediction pred;
    pred.epsilon = epsilon;
    pred.validity_note = n.borderline_n5() ? BlowupPrediction::Validity::n_equals_5_warning
                                           : BlowupPrediction::Validity::ok;
    const double scale = std::pow(epsilon, -1.0 / (n.value() - 4.0));
    const double height_exp = (n.value() - 2.0) / 2.0;
    for (int j = 0; j < cp.config.k(); ++j) {
        const double lam_eps = scale / cp.config.scales[j];
        pred.per_peak.push_back(
            {cp.config.points[j], lam_eps, std::pow(lam_eps, height_exp)});
    }
    pred.error_order = "O(lambda_eps^{-(n+2)/2})";
    return pred;
}

double far_field(const GreenProvider& g, const BlowupPrediction& pred, const Vec& x,
                 const UniversalConstants& consts) {
    g.require_interior(x, "far_field");
    const double d = near_peak_exclusion(g, pred);
    for (const auto& peak : pred.per_peak)
        if ((x - peak.location).norm() <= d)
            throw DomainError("far_field: point is inside the near-peak exclusion radius");
    const double m = (g.dim() - 2.0) / 2.0;
    double v = 0.0;
    for (const auto& peak : pred.per_peak)
        v += consts.a_const * g.green(peak.location, x) / std::pow(peak.lambda_eps, m);
    return v;
}

std::vector<double> approximate_field(const GreenProvider& g, const BlowupPrediction& pred,
                                      const std::vector<Vec>& grid) {
    std::vector<double> values;
    values.reserve(grid.size());
    for (const auto& x : grid) {
        g.require_interior(x, "approximate_field");
        double v = 0.0;
        for (const auto& peak : pred.per_peak)
            v += projected_bubble(BubbleParams(peak.location, peak.lambda_eps), x, g);
        values.push_back(v);
    }
    return values;
}

}  // namespace brn
