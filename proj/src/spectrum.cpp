#include "magq/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "magq/perturbation.hpp"

namespace magq {

namespace {

double mean_omega_q(const ModelParams& p) {
    double s = 0.0;
    for (const auto& q : p.qubits) s += q.omega_q;
    return s / static_cast<double>(p.qubits.size());
}

// H(omega0) = base + omega0 * N_boson, diagonalized many times per sweep.
struct SweptHamiltonian {
    DenseOperator base;
    DenseOperator number;

    explicit SweptHamiltonian(const ModelParams& p, double energy_shift = 0.0) {
        ModelParams at_zero = p;
        at_zero.omega0 = 0.0;
        base = build_hamiltonian(at_zero);
        if (energy_shift != 0.0) {
            base += energy_shift * DenseOperator::Identity(base.rows(), base.cols());
        }
        number = boson_number(p.space);
    }

    DenseOperator at(double omega0) const { return base + omega0 * number; }
};

Eigen::VectorXd eigenvalues_at(const SweptHamiltonian& h, double omega0) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(h.at(omega0),
                                                        Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

struct PairSample {
    double gap = 0.0;
    int idx_lo = 0;
    int idx_hi = 0;
};

PairSample pair_gap_at(const SweptHamiltonian& h, double omega0,
                       const LevelPairSelector& sel) {
    PairSample s;
    if (!sel.uses_overlap()) {
        const Eigen::VectorXd evals = eigenvalues_at(h, omega0);
        s.idx_lo = sel.index_i();
        s.idx_hi = sel.index_j();
        s.gap = evals(s.idx_hi) - evals(s.idx_lo);
        return s;
    }
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(h.at(omega0));
    const auto& evals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const int d = static_cast<int>(evals.size());
    int best = -1, second = -1;
    double best_score = -1.0, second_score = -1.0;
    for (int k = 0; k < d; ++k) {
        const double score = std::norm(sel.target1().dot(vecs.col(k))) +
                             std::norm(sel.target2().dot(vecs.col(k)));
        if (score > best_score) {
            second = best;
            second_score = best_score;
            best = k;
            best_score = score;
        } else if (score > second_score) {
            second = k;
            second_score = score;
        }
    }
    s.idx_lo = std::min(best, second);
    s.idx_hi = std::max(best, second);
    s.gap = std::abs(evals(s.idx_hi) - evals(s.idx_lo));
    return s;
}

ModelParams with_doubled_cutoff(const ModelParams& p) {
    ModelParams big = p;
    big.space = build_space(p.space.n_max * 2, p.space.n_qubits);
    return big;
}

constexpr double kConvergenceRelTol = 1e-3;

} // namespace

LevelPairSelector LevelPairSelector::sorted_pair(int i, int j) {
    if (i == j || i < 0 || j < 0) {
        throw ParamError("LevelPairSelector: need two distinct non-negative indices");
    }
    LevelPairSelector s;
    s.overlap_ = false;
    s.i_ = std::min(i, j);
    s.j_ = std::max(i, j);
    return s;
}

LevelPairSelector LevelPairSelector::overlap(StateVector t1, StateVector t2) {
    if (t1.size() != t2.size() || t1.size() == 0) {
        throw ParamError("LevelPairSelector: overlap targets must share a nonzero dimension");
    }
    LevelPairSelector s;
    s.overlap_ = true;
    s.t1_ = std::move(t1);
    s.t2_ = std::move(t2);
    return s;
}

SpectrumSweep sweep(const ModelParams& p, double omega0_lo, double omega0_hi,
                    const SweepOptions& opts) {
    p.validate();
    if (!(omega0_lo < omega0_hi)) throw ParamError("sweep: need omega0_lo < omega0_hi");
    if (opts.n_points < 2) throw ParamError("sweep: need n_points >= 2");
    if (opts.n_levels < 1 || opts.n_levels > p.space.dim()) {
        throw ParamError("sweep: n_levels outside 1..dim");
    }

    SpectrumSweep out;
    out.params = p;
    out.omega0_grid.resize(static_cast<std::size_t>(opts.n_points));
    for (int i = 0; i < opts.n_points; ++i) {
        out.omega0_grid[static_cast<std::size_t>(i)] =
            omega0_lo + (omega0_hi - omega0_lo) * i / (opts.n_points - 1);
    }
    out.levels.resize(opts.n_points, opts.n_levels);

    const SweptHamiltonian h(p);
    std::optional<SweptHamiltonian> h_big;
    ModelParams p_big;
    if (opts.check_convergence) {
        p_big = with_doubled_cutoff(p);
        h_big.emplace(p_big);
    }

    std::atomic<int> next{0};
    std::atomic<bool> diverged{false};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= opts.n_points) return;
            const double w0 = out.omega0_grid[static_cast<std::size_t>(i)];
            const Eigen::VectorXd evals = eigenvalues_at(h, w0);
            for (int m = 0; m < opts.n_levels; ++m) out.levels(i, m) = evals(m);
            if (h_big) {
                const Eigen::VectorXd big = eigenvalues_at(*h_big, w0);
                for (int m = 0; m < opts.n_levels; ++m) {
                    const double rel = std::abs(evals(m) - big(m)) /
                                       std::max({1.0, std::abs(evals(m)), std::abs(big(m))});
                    if (rel >= kConvergenceRelTol) diverged = true;
                }
            }
        }
    };

    const int n_threads = std::clamp(opts.threads, 1, opts.n_points);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (diverged) {
        std::ostringstream msg;
        msg << "sweep: retained levels change by >= " << kConvergenceRelTol
            << " when n_max doubles from " << p.space.n_max << "; raise n_max";
        throw ConvergenceError(msg.str());
    }
    return out;
}

GapFeature find_gap(const ModelParams& p, double omega0_lo, double omega0_hi,
                    const LevelPairSelector& sel, const GapOptions& opts) {
    p.validate();
    if (!(omega0_lo < omega0_hi)) throw ParamError("find_gap: need omega0_lo < omega0_hi");
    if (opts.scan_points < 5) throw ParamError("find_gap: need scan_points >= 5");
    if (sel.uses_overlap() && sel.target1().size() != p.space.dim()) {
        throw ParamError("find_gap: selector targets do not match the space dimension");
    }

    const SweptHamiltonian h(p, opts.energy_shift);
    const double thr_abs = opts.crossing_threshold * mean_omega_q(p);

    auto locate = [&](const SweptHamiltonian& ham) -> GapFeature {
        // Coarse scan; candidate minima are interior local minima with
        // plateaus collapsed to one candidate.
        const int n = opts.scan_points;
        std::vector<double> xs(static_cast<std::size_t>(n)), gaps(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            xs[static_cast<std::size_t>(i)] =
                omega0_lo + (omega0_hi - omega0_lo) * i / (n - 1);
            gaps[static_cast<std::size_t>(i)] =
                pair_gap_at(ham, xs[static_cast<std::size_t>(i)], sel).gap;
        }
        std::vector<int> candidates;
        for (int i = 1; i + 1 < n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            if (gaps[si] < gaps[si - 1] && gaps[si] <= gaps[si + 1]) {
                candidates.push_back(i);
            }
        }
        if (candidates.empty()) {
            throw NotFoundError("find_gap: no interior gap minimum in the window");
        }
        if (candidates.size() > 1) {
            std::ostringstream msg;
            msg << "find_gap: " << candidates.size()
                << " candidate minima in the window; narrow it";
            throw AmbiguityError(msg.str());
        }

        // Golden-section refinement on the bracketing interval.
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        const int c = candidates.front();
        double a = xs[static_cast<std::size_t>(c - 1)];
        double b = xs[static_cast<std::size_t>(c + 1)];
        double x1 = b - phi * (b - a);
        double x2 = a + phi * (b - a);
        PairSample s1 = pair_gap_at(ham, x1, sel);
        PairSample s2 = pair_gap_at(ham, x2, sel);
        double best_x = xs[static_cast<std::size_t>(c)];
        PairSample best = pair_gap_at(ham, best_x, sel);
        auto consider = [&](double x, const PairSample& s) {
            if (s.gap < best.gap) {
                best = s;
                best_x = x;
            }
        };
        consider(x1, s1);
        consider(x2, s2);
        const double x_scale = std::max({1.0, std::abs(a), std::abs(b)});
        while ((b - a) > opts.rel_tol * x_scale) {
            if (s1.gap < s2.gap) {
                b = x2;
                x2 = x1;
                s2 = s1;
                x1 = b - phi * (b - a);
                s1 = pair_gap_at(ham, x1, sel);
                consider(x1, s1);
            } else {
                a = x1;
                x1 = x2;
                s1 = s2;
                x2 = a + phi * (b - a);
                s2 = pair_gap_at(ham, x2, sel);
                consider(x2, s2);
            }
        }

        GapFeature f;
        f.omega0_star = best_x;
        f.min_gap = best.gap;
        f.level_pair = {best.idx_lo, best.idx_hi};
        f.kind = best.gap < thr_abs ? GapKind::crossing : GapKind::anticrossing;
        return f;
    };

    GapFeature f = locate(h);
    if (opts.check_convergence) {
        const ModelParams p_big = with_doubled_cutoff(p);
        SweptHamiltonian h_big(p_big, opts.energy_shift);
        LevelPairSelector sel_big = sel;
        if (sel.uses_overlap()) {
            // Re-express overlap targets in the enlarged space.
            StateVector t1 = StateVector::Zero(p_big.space.dim());
            StateVector t2 = StateVector::Zero(p_big.space.dim());
            t1.head(p.space.dim()) = sel.target1();
            t2.head(p.space.dim()) = sel.target2();
            sel_big = LevelPairSelector::overlap(std::move(t1), std::move(t2));
        }
        const PairSample s_big = pair_gap_at(h_big, f.omega0_star, sel_big);
        const bool both_crossings = f.min_gap < thr_abs && s_big.gap < thr_abs;
        const double rel = std::abs(f.min_gap - s_big.gap) /
                           std::max(std::abs(f.min_gap), std::abs(s_big.gap));
        if (!both_crossings && rel >= kConvergenceRelTol) {
            std::ostringstream msg;
            msg << "find_gap: min_gap moves from " << f.min_gap << " to " << s_big.gap
                << " when n_max doubles from " << p.space.n_max << "; raise n_max";
            throw ConvergenceError(msg.str());
        }
    }
    return f;
}

GeffExtraction extract_geff(const ModelParams& p, const GapOptions& opts) {
    p.validate();
    if (p.qubits.size() != 3) throw ParamError("extract_geff: needs 3 qubits");
    double max_gcr = 0.0;
    for (const auto& q : p.qubits) max_gcr = std::max(max_gcr, std::abs(q.g_CR));
    if (max_gcr == 0.0) {
        throw ParamError("extract_geff: needs a nonzero counter-rotating coupling");
    }

    // Window centred on the perturbative crossing estimate.
    double gr = 0.0, gcr = 0.0;
    for (const auto& q : p.qubits) {
        gr += q.g_R / 3.0;
        gcr += q.g_CR / 3.0;
    }
    const double wq = mean_omega_q(p);
    const double sum_wq =
        std::accumulate(p.qubits.begin(), p.qubits.end(), 0.0,
                        [](double s, const QubitParams& q) { return s + q.omega_q; });
    const double shift = crossing_shift(gr, gcr, wq) - 3.0 * wq;
    const double center = sum_wq + shift;
    const double half_width = std::max(0.02 * wq, 4.0 * std::abs(shift));

    ModelParams run = p;
    run.omega0 = center;
    const StateVector one_ggg = basis_state(p.space, 1, std::string(3, 'g'));
    const StateVector zero_eee = basis_state(p.space, 0, std::string(3, 'e'));
    const auto sel = LevelPairSelector::overlap(one_ggg, zero_eee);

    GeffExtraction out;
    out.feature = find_gap(run, center - half_width, center + half_width, sel, opts);
    out.geff = out.feature.min_gap / 2.0;
    out.omega0_star = out.feature.omega0_star;
    return out;
}

GeffFit fit_geff_surface(const ModelParams& base, const std::vector<double>& gR_grid,
                         const std::vector<double>& gCR_grid, const GapOptions& opts) {
    base.validate();
    if (base.qubits.size() != 3 || !base.identical_qubits()) {
        throw ParamError("fit_geff_surface: base model needs 3 identical qubits");
    }
    if (gR_grid.empty() || gCR_grid.empty()) {
        throw ParamError("fit_geff_surface: empty coupling grid");
    }
    const double wq = base.qubits[0].omega_q;
    for (double g : gR_grid) {
        if (!(g > 0.0) || g > 0.15 * wq) {
            throw ParamError("fit_geff_surface: g_R grid must lie in (0, 0.15 omega_q]");
        }
    }
    for (double g : gCR_grid) {
        if (!(g > 0.0) || g > 0.15 * wq) {
            throw ParamError("fit_geff_surface: g_CR grid must lie in (0, 0.15 omega_q]");
        }
    }

    GeffFit fit;
    for (double gr : gR_grid) {
        for (double gcr : gCR_grid) {
            GeffFitPoint pt;
            pt.g_R = gr;
            pt.g_CR = gcr;
            ModelParams p = base;
            for (auto& q : p.qubits) {
                q.g_R = gr;
                q.g_CR = gcr;
            }
            try {
                pt.geff = extract_geff(p, opts).geff;
                pt.valid = true;
            } catch (const NotFoundError&) {
            } catch (const AmbiguityError&) {
            } catch (const ConvergenceError&) {
            }
            fit.points.push_back(pt);
            if (pt.valid) ++fit.n_used;
        }
    }
    if (fit.n_used < 6) {
        throw NotFoundError("fit_geff_surface: only " + std::to_string(fit.n_used) +
                            " valid grid points, need at least 6");
    }

    // Linear least squares in the two monomials.
    const double wq4 = wq * wq * wq * wq;
    double sxx = 0, sxy = 0, syy = 0, sxd = 0, syd = 0, sdd = 0;
    for (const auto& pt : fit.points) {
        if (!pt.valid) continue;
        const double x = pt.g_CR * pt.g_R * pt.g_R * pt.g_R * pt.g_R / wq4;
        const double y = pt.g_CR * pt.g_CR * pt.g_CR * pt.g_R * pt.g_R / wq4;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxd += x * pt.geff;
        syd += y * pt.geff;
        sdd += pt.geff * pt.geff;
    }
    const double det = sxx * syy - sxy * sxy;
    if (std::abs(det) <= 1e-30 * std::max(sxx * syy, 1e-300)) {
        throw ParamError("fit_geff_surface: degenerate design matrix; vary both couplings");
    }
    fit.c1 = (syy * sxd - sxy * syd) / det;
    fit.c2 = (sxx * syd - sxy * sxd) / det;

    double ss_res = 0.0;
    for (const auto& pt : fit.points) {
        if (!pt.valid) continue;
        const double x = pt.g_CR * pt.g_R * pt.g_R * pt.g_R * pt.g_R / wq4;
        const double y = pt.g_CR * pt.g_CR * pt.g_CR * pt.g_R * pt.g_R / wq4;
        const double r = pt.geff - (fit.c1 * x + fit.c2 * y);
        ss_res += r * r;
    }
    fit.residual = std::sqrt(ss_res / sdd);
    return fit;
}

} // namespace magq
