#include "brn/critical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

namespace brn {

namespace {

struct Packed {
    // z = (a_1 ... a_k, lambda_1 ... lambda_k)
    static PeakConfig unpack(const Vec& z, int k, int n) {
        PeakConfig c;
        c.points.reserve(k);
        for (int j = 0; j < k; ++j) c.points.push_back(z.segment(j * n, n));
        c.scales = z.tail(k);
        return c;
    }
    static Vec pack(const PeakConfig& c, int n) {
        const int k = c.k();
        Vec z(k * n + k);
        for (int j = 0; j < k; ++j) z.segment(j * n, n) = c.points[j];
        z.tail(k) = c.scales;
        return z;
    }
};

bool feasible(const GreenProvider& g, const Vec& z, int k, int n, const SearchConfig& cfg) {
    const double min_sep = 1e-6 * g.spec().diameter();
    for (int j = 0; j < k; ++j) {
        const Vec a = z.segment(j * n, n);
        if (g.spec().boundary_distance(a) <= 0.0) return false;
        for (int l = j + 1; l < k; ++l)
            if ((a - z.segment(l * n, n)).norm() < min_sep) return false;
        const double lam = z[k * n + j];
        if (!(lam >= cfg.scale_min && lam <= cfg.scale_max)) return false;
    }
    return true;
}

Vec newton_step(const Mat& hess, const Vec& grad) {
    Eigen::FullPivLU<Mat> lu(hess);
    if (lu.isInvertible()) return lu.solve(-grad);
    // pseudo-inverse fallback near singular Hessians
    Eigen::JacobiSVD<Mat> svd(hess, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = 1e-12 * svd.singularValues().maxCoeff();
    Vec s = svd.singularValues();
    for (int i = 0; i < s.size(); ++i) s[i] = s[i] > cutoff ? 1.0 / s[i] : 0.0;
    return -(svd.matrixV() * s.asDiagonal() * svd.matrixU().transpose() * grad);
}

std::optional<Vec> run_newton(const GreenProvider& g, Vec z, int k, const SearchConfig& cfg,
                              const UniversalConstants& consts) {
    const int n = g.dim();
    if (!feasible(g, z, k, n, cfg)) return std::nullopt;

    Vec grad = psi_grad(g, Packed::unpack(z, k, n), consts);
    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        const double gn = grad.norm();
        if (gn <= cfg.grad_tol) return z;

        const Mat hess = psi_hess(g, Packed::unpack(z, k, n), consts);
        const Vec step = newton_step(hess, grad);
        if (!step.allFinite() || step.norm() == 0.0) return std::nullopt;

        // backtracking line search on |grad Psi|^2
        double t = 1.0;
        bool accepted = false;
        while (t >= 1.0 / 1024.0) {
            const Vec trial = z + t * step;
            if (feasible(g, trial, k, n, cfg)) {
                const Vec gtrial = psi_grad(g, Packed::unpack(trial, k, n), consts);
                if (gtrial.squaredNorm() <= (1.0 - 1e-4 * t) * gn * gn) {
                    z = trial;
                    grad = gtrial;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    return std::nullopt;
}

/// Distance between two configs modulo peak permutation (exhaustive
/// assignment, adequate for the k <= 6 regime this artifact targets).
double config_distance(const PeakConfig& a, const PeakConfig& b, double diam) {
    const int k = a.k();
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double d = 0.0;
        for (int j = 0; j < k; ++j) {
            d = std::max(d, (a.points[j] - b.points[perm[j]]).norm() / diam);
            d = std::max(d, std::abs(a.scales[j] - b.scales[perm[j]]) /
                                std::max(a.scales[j], b.scales[perm[j]]));
        }
        best = std::min(best, d);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

/// Canonical peak order: lexicographic by coordinates, ties by scale.
void canonicalize(PeakConfig& c) {
    const int k = c.k();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (lex_less(c.points[i], c.points[j])) return true;
        if (lex_less(c.points[j], c.points[i])) return false;
        return c.scales[i] < c.scales[j];
    });
    PeakConfig sorted;
    sorted.scales = Vec(k);
    for (int j = 0; j < k; ++j) {
        sorted.points.push_back(c.points[order[j]]);
        sorted.scales[j] = c.scales[order[j]];
    }
    c = std::move(sorted);
}

CriticalPoint classify(const GreenProvider& g, PeakConfig config, const SearchConfig& cfg,
                       const UniversalConstants& consts) {
    canonicalize(config);
    CriticalPoint cp;
    cp.psi = psi_value(g, config, consts);
    cp.grad_norm = psi_grad(g, config, consts).norm();  // fresh re-verification
    const Mat hess = psi_hess(g, config, consts);
    Eigen::SelfAdjointEigenSolver<Mat> eig(hess, Eigen::EigenvaluesOnly);
    cp.hessian_eigenvalues = eig.eigenvalues();
    cp.morse_index = static_cast<int>((cp.hessian_eigenvalues.array() < 0.0).count());
    const double emax = cp.hessian_eigenvalues.cwiseAbs().maxCoeff();
    const double emin = cp.hessian_eigenvalues.cwiseAbs().minCoeff();
    cp.nondegenerate = emin > cfg.nondegeneracy_tol * emax;
    const InteractionMatrix mk = m_matrix(g, config.points);
    cp.m_smallest_eigenvalue = mk.smallest_eigenvalue;
    cp.m_matrix_positive = is_positive(mk);
    cp.config = std::move(config);
    return cp;
}

int thread_count(const SearchConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("BRN_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

void SearchConfig::validate() const {
    if (starts <= 0 || max_newton_iters <= 0) throw std::invalid_argument("SearchConfig: counts must be positive");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("SearchConfig: grad_tol must be > 0");
    if (!(scale_min > 0.0 && scale_min < scale_max))
        throw std::invalid_argument("SearchConfig: need 0 < scale_min < scale_max");
}

std::vector<CriticalPoint> find_critical(const GreenProvider& g, int k, const SearchConfig& cfg,
                                         const UniversalConstants& consts) {
    cfg.validate();
    if (k < 1) throw std::invalid_argument("find_critical: k must be >= 1");
    const int n = g.dim();
    const double diam = g.spec().diameter();
    const double margin = cfg.interior_margin_rel * diam;

    // all randomness up front, so the search is seed-deterministic
    std::mt19937_64 rng(cfg.seed);
    Vec lo, hi;
    g.spec().bounding_box(lo, hi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> loglam(std::log(cfg.scale_min), std::log(cfg.scale_max));

    auto sample_interior = [&]() {
        for (int tries = 0; tries < 100000; ++tries) {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
            if (g.spec().boundary_distance(x) > margin) return x;
        }
        throw DomainError("find_critical: could not sample interior start points");
    };

    std::vector<Vec> starts;
    starts.reserve(cfg.starts);
    const double sep = cfg.dedup_radius_rel * diam;
    for (int s = 0; s < cfg.starts; ++s) {
        Vec z(k * n + k);
        for (int j = 0; j < k; ++j) {
            Vec a;
            for (int tries = 0;; ++tries) {
                a = sample_interior();
                bool ok = true;
                for (int l = 0; l < j; ++l)
                    if ((a - z.segment(l * n, n)).norm() <= sep) ok = false;
                if (ok || tries > 1000) break;
            }
            z.segment(j * n, n) = a;
            z[k * n + j] = std::exp(loglam(rng));
        }
        starts.push_back(std::move(z));
    }

    std::vector<std::optional<Vec>> solutions(starts.size());
    const int nthreads = std::min<int>(thread_count(cfg), static_cast<int>(starts.size()));
    std::vector<std::future<void>> futures;
    std::atomic<size_t> next{0};
    for (int t = 0; t < nthreads; ++t)
        futures.push_back(std::async(std::launch::async, [&]() {
            for (size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1))
                solutions[i] = run_newton(g, starts[i], k, cfg, consts);
        }));
    for (auto& f : futures) f.get();

    // deterministic merge: dedup in start order, then sort
    std::vector<CriticalPoint> found;
    for (const auto& sol : solutions) {
        if (!sol) continue;
        const PeakConfig c = Packed::unpack(*sol, k, n);
        bool duplicate = false;
        for (const auto& prev : found)
            if (config_distance(c, prev.config, diam) < cfg.dedup_radius_rel) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        CriticalPoint cp = classify(g, c, cfg, consts);
        if (cp.grad_norm > cfg.grad_tol) continue;
        found.push_back(std::move(cp));
    }

    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.psi != b.psi) return a.psi < b.psi;
        for (int j = 0; j < a.config.k(); ++j) {
            if (lex_less(a.config.points[j], b.config.points[j])) return true;
            if (lex_less(b.config.points[j], a.config.points[j])) return false;
        }
        return false;
    });
    return found;
}

std::vector<Vec> s_set(const GreenProvider& g, const std::vector<Vec>& base_points,
                       const SearchConfig& cfg, const UniversalConstants& consts) {
    cfg.validate();
    const int k = static_cast<int>(base_points.size());
    const int n = g.dim();
    for (const auto& p : base_points) g.require_interior(p, "s_set");

    std::mt19937_64 rng(cfg.seed ^ 0x5e7u);
    std::uniform_real_distribution<double> loglam(std::log(cfg.scale_min), std::log(cfg.scale_max));

    auto lambda_grad = [&](const Vec& lam) {
        PeakConfig c{base_points, lam};
        return Vec(psi_grad(g, c, consts).tail(k));
    };

    std::vector<Vec> solutions;
    bool any_solved = false;
    for (int s = 0; s < cfg.starts; ++s) {
        Vec lam(k);
        for (int j = 0; j < k; ++j) lam[j] = std::exp(loglam(rng));

        bool converged = false;
        Vec grad = lambda_grad(lam);
        for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
            if (grad.norm() <= cfg.grad_tol) {
                converged = true;
                break;
            }
            PeakConfig c{base_points, lam};
            const Mat hll = psi_hess(g, c, consts).bottomRightCorner(k, k);
            const Vec step = newton_step(hll, grad);
            double t = 1.0;
            bool accepted = false;
            while (t >= 1.0 / 1024.0) {
                const Vec trial = lam + t * step;
                if (trial.minCoeff() >= cfg.scale_min && trial.maxCoeff() <= cfg.scale_max) {
                    const Vec gt = lambda_grad(trial);
                    if (gt.squaredNorm() <= (1.0 - 1e-4 * t) * grad.squaredNorm()) {
                        lam = trial;
                        grad = gt;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if (!accepted) break;
        }
        if (!converged) continue;
        any_solved = true;

        // full stationarity: the position gradient must vanish too
        PeakConfig c{base_points, lam};
        if (psi_grad(g, c, consts).norm() > cfg.grad_tol) continue;

        bool duplicate = false;
        for (const auto& prev : solutions)
            if (((lam - prev).cwiseQuotient(prev)).cwiseAbs().maxCoeff() < cfg.dedup_radius_rel)
                duplicate = true;
        if (!duplicate) solutions.push_back(lam);
    }

    if (solutions.empty() && any_solved)
        throw InconsistentBasePointsError(
            "s_set: scales solve the lambda-stationarity system but the position gradient "
            "does not vanish at the given base points");
    std::sort(solutions.begin(), solutions.end(), lex_less);
    return solutions;
}

CountReport count_solutions(const GreenProvider& g, int k_max, const SearchConfig& cfg,
                            const UniversalConstants& consts) {
    if (k_max < 1) throw std::invalid_argument("count_solutions: k_max must be >= 1");
    CountReport report;
    report.k_max = k_max;
    report.total = 0;
    for (int k = 1; k <= k_max; ++k) {
        CountReport::PerK per{k, {}, {}, 0};
        for (auto& cp : find_critical(g, k, cfg, consts)) {
            if (cp.nondegenerate && cp.m_matrix_positive)
                per.t_set.push_back(std::move(cp));
            else
                per.excluded.push_back(std::move(cp));
        }
        per.count = static_cast<int>(per.t_set.size());
        report.total += per.count;
        report.per_k.push_back(std::move(per));
    }
    return report;
}

}  // namespace brn
