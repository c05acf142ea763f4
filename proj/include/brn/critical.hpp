#pragma once

#include "brn/psi.hpp"

#include <cstdint>
#include <vector>

namespace brn {

struct SearchConfig {
    int starts = 200;
    int max_newton_iters = 120;
    double grad_tol = 1e-7;
    double dedup_radius_rel = 1e-4;     // relative to diam(Omega) for points, relative for scales
    double nondegeneracy_tol = 1e-8;    // relative to the largest |Hessian eigenvalue|
    std::uint64_t seed = 20240817;
    double interior_margin_rel = 0.05;  // starts keep this fraction of diam away from the boundary
    double scale_min = 1e-3;
    double scale_max = 1e3;
    int threads = 0;                    // 0: hardware concurrency

    void validate() const;
};

struct CriticalPoint {
    PeakConfig config;
    double psi = 0.0;
    double grad_norm = 0.0;
    Vec hessian_eigenvalues;  // sorted ascending
    int morse_index = 0;
    bool nondegenerate = false;
    bool m_matrix_positive = false;
    double m_smallest_eigenvalue = 0.0;
};

struct CountReport {
    struct PerK {
        int k;
        std::vector<CriticalPoint> t_set;  // nondegenerate points with positive M_k
        std::vector<CriticalPoint> excluded;  // found but degenerate or M_k not positive
        int count;
    };
    std::vector<PerK> per_k;
    int k_max;
    int total;
};

/// Seeded multistart damped Newton on grad Psi_k. Returns critical points
/// deduplicated modulo peak permutation, sorted by (Psi value, coordinates).
std::vector<CriticalPoint> find_critical(const GreenProvider& g, int k, const SearchConfig& cfg,
                                         const UniversalConstants& consts);

/// All scale vectors making Psi_k fully stationary at the fixed peak
/// locations. Throws InconsistentBasePointsError when every solved scale
/// vector leaves a nonzero position gradient.
std::vector<Vec> s_set(const GreenProvider& g, const std::vector<Vec>& base_points,
                       const SearchConfig& cfg, const UniversalConstants& consts);

/// Runs find_critical for k = 1..k_max and totals the nondegenerate,
/// positive-M_k points.
CountReport count_solutions(const GreenProvider& g, int k_max, const SearchConfig& cfg,
                            const UniversalConstants& consts);

}  // namespace brn
