#pragma once

#include "brn/critical.hpp"
#include "brn/green.hpp"

#include <vector>

namespace brn {

/// Predicted blow-up asymptotics derived from a critical point at a given
/// epsilon: concentration scales lambda_{j,eps} = eps^{-1/(n-4)} / lambda_j
/// and peak heights lambda_{j,eps}^{(n-2)/2}.
struct BlowupPrediction {
    double epsilon;
    struct Peak {
        Vec location;
        double lambda_eps;
        double height;
    };
    std::vector<Peak> per_peak;
    enum class Validity { ok, n_equals_5_warning } validity_note = Validity::ok;
    /// Order of the neglected remainder w_eps, recorded as metadata.
    std::string error_order;
};

BlowupPrediction predict(const CriticalPoint& cp, double epsilon, Dimension n);

/// Leading-order far-field profile A * sum_j G(a_j, x) / lambda_{j,eps}^{(n-2)/2},
/// valid away from the peaks; throws when x is within the near-peak exclusion
/// distance (0.1 * min(peak separation, boundary distance)).
double far_field(const GreenProvider& g, const BlowupPrediction& pred, const Vec& x,
                 const UniversalConstants& consts);

/// Sum of projected bubbles at the predicted scales, sampled on a grid.
std::vector<double> approximate_field(const GreenProvider& g, const BlowupPrediction& pred,
                                      const std::vector<Vec>& grid);

}  // namespace brn
