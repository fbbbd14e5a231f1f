#include "magq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magq/perturbation.hpp"

namespace magq {

namespace {

constexpr double kConvergenceRelTol = 1e-3;

// All recorded observables are diagonal in the computational basis, so each
// expectation value is a weighted sum of |psi_i|^2.
struct DiagonalObservables {
    std::vector<double> fock;                      // magnon number per index
    std::vector<std::vector<double>> qubit_excited; // [qubit][index] 0/1
    std::vector<double> all_excited;               // 0/1

    explicit DiagonalObservables(const HilbertSpace& space) {
        const int d = space.dim();
        fock.resize(static_cast<std::size_t>(d));
        all_excited.resize(static_cast<std::size_t>(d));
        qubit_excited.assign(static_cast<std::size_t>(space.n_qubits),
                             std::vector<double>(static_cast<std::size_t>(d)));
        const unsigned all = (1u << space.n_qubits) - 1u;
        for (int i = 0; i < d; ++i) {
            const auto si = static_cast<std::size_t>(i);
            fock[si] = static_cast<double>(space.fock_of(i));
            all_excited[si] = space.bits_of(i) == all ? 1.0 : 0.0;
            for (int q = 1; q <= space.n_qubits; ++q) {
                qubit_excited[static_cast<std::size_t>(q - 1)][si] =
                    static_cast<double>(space.qubit_bit(i, q));
            }
        }
    }
};

// Copy amplitudes into a space with a larger Fock cutoff (same qubit count).
StateVector embed(const StateVector& v, const HilbertSpace& from, const HilbertSpace& to) {
    StateVector out = StateVector::Zero(to.dim());
    out.head(from.dim()) = v; // boson-major layout: shared indices coincide
    return out;
}

DynamicsTrace evolve_impl(const ModelParams& p, const StateVector& initial,
                          const std::vector<double>& times, const StateVector& target) {
    const DenseOperator h = build_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(h);
    const auto& evals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const StateVector coeffs = vecs.adjoint() * initial;

    const DiagonalObservables obs(p.space);
    const int d = p.space.dim();
    const std::size_t nt = times.size();

    DynamicsTrace tr;
    tr.times = times;
    tr.magnon_number.resize(nt);
    tr.three_qubit_correlator.resize(nt);
    tr.target_fidelity.resize(nt);
    tr.norm.resize(nt);
    tr.energy.resize(nt);
    tr.qubit_excitation.assign(static_cast<std::size_t>(p.space.n_qubits),
                               std::vector<double>(nt));

    StateVector phase(d), psi(d);
    for (std::size_t it = 0; it < nt; ++it) {
        const double t = times[it];
        for (int k = 0; k < d; ++k) {
            phase(k) = std::polar(1.0, -evals(k) * t) * coeffs(k);
        }
        psi.noalias() = vecs * phase;

        double n_mag = 0.0, p_all = 0.0, energy = 0.0;
        std::array<double, 3> p_q{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) {
            energy += std::norm(phase(k)) * evals(k);
        }
        for (int i = 0; i < d; ++i) {
            const auto si = static_cast<std::size_t>(i);
            const double w = std::norm(psi(i));
            n_mag += w * obs.fock[si];
            p_all += w * obs.all_excited[si];
            for (int q = 0; q < p.space.n_qubits; ++q) {
                p_q[static_cast<std::size_t>(q)] +=
                    w * obs.qubit_excited[static_cast<std::size_t>(q)][si];
            }
        }
        tr.magnon_number[it] = n_mag;
        tr.three_qubit_correlator[it] = p_all;
        for (int q = 0; q < p.space.n_qubits; ++q) {
            tr.qubit_excitation[static_cast<std::size_t>(q)][it] =
                p_q[static_cast<std::size_t>(q)];
        }
        tr.target_fidelity[it] = std::norm(target.dot(psi));
        tr.norm[it] = psi.norm();
        tr.energy[it] = energy;
    }
    return tr;
}

} // namespace

StateVector ghz_superposition_target(const HilbertSpace& space) {
    const std::string g(static_cast<std::size_t>(space.n_qubits), 'g');
    const std::string e(static_cast<std::size_t>(space.n_qubits), 'e');
    const std::complex<double> minus_i{0.0, -1.0};
    return (basis_state(space, 1, g) + minus_i * basis_state(space, 0, e)) / std::sqrt(2.0);
}

std::vector<double> default_time_grid(const ModelParams& p, int n_points,
                                      double span_periods) {
    p.validate();
    if (n_points < 2) throw ParamError("default_time_grid: need n_points >= 2");
    double gr = 0.0, gcr = 0.0, wq = 0.0;
    for (const auto& q : p.qubits) {
        gr += q.g_R / static_cast<double>(p.qubits.size());
        gcr += q.g_CR / static_cast<double>(p.qubits.size());
        wq += q.omega_q / static_cast<double>(p.qubits.size());
    }
    const double geff = std::abs(geff_total_resonance(gr, gcr, wq));
    // Couplings without a perturbative transfer rate get a fixed long window.
    const double period = geff > 0.0 ? M_PI / geff : 1e4 * 2.0 * M_PI / wq;
    std::vector<double> times(static_cast<std::size_t>(n_points));
    const double t_end = span_periods * period;
    for (int i = 0; i < n_points; ++i) {
        times[static_cast<std::size_t>(i)] = t_end * i / (n_points - 1);
    }
    return times;
}

DynamicsTrace evolve(const ModelParams& p, const StateVector& initial,
                     const std::vector<double>& times, const EvolveOptions& opts) {
    p.validate();
    if (times.empty()) throw ParamError("evolve: empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
            throw ParamError("evolve: times must be nonnegative and strictly increasing");
        }
    }
    if (initial.size() != p.space.dim()) {
        throw ParamError("evolve: initial state does not match the space dimension");
    }
    const double norm0 = initial.norm();
    if (std::abs(norm0 - 1.0) > 1e-10) {
        throw ParamError("evolve: initial state must be normalized");
    }

    StateVector target = opts.target.value_or(
        p.space.n_qubits == 3 ? ghz_superposition_target(p.space) : initial);
    if (target.size() != p.space.dim()) {
        throw ParamError("evolve: target state does not match the space dimension");
    }

    DynamicsTrace tr = evolve_impl(p, initial, times, target);

    if (opts.check_convergence) {
        ModelParams big = p;
        big.space = build_space(p.space.n_max * 2, p.space.n_qubits);
        const DynamicsTrace tr_big =
            evolve_impl(big, embed(initial, p.space, big.space), times,
                        embed(target, p.space, big.space));
        double worst = 0.0;
        for (std::size_t it = 0; it < times.size(); ++it) {
            worst = std::max(worst, std::abs(tr.magnon_number[it] - tr_big.magnon_number[it]) /
                                        std::max(1.0, std::abs(tr.magnon_number[it])));
            worst = std::max(worst, std::abs(tr.three_qubit_correlator[it] -
                                             tr_big.three_qubit_correlator[it]));
            worst = std::max(worst,
                             std::abs(tr.target_fidelity[it] - tr_big.target_fidelity[it]));
            for (int q = 0; q < p.space.n_qubits; ++q) {
                const auto sq = static_cast<std::size_t>(q);
                worst = std::max(worst, std::abs(tr.qubit_excitation[sq][it] -
                                                 tr_big.qubit_excitation[sq][it]));
            }
        }
        if (worst >= kConvergenceRelTol) {
            std::ostringstream msg;
            msg << "evolve: observables change by " << worst << " when n_max doubles from "
                << p.space.n_max << "; raise n_max";
            throw ConvergenceError(msg.str());
        }
    }
    return tr;
}

DynamicsTrace evolve(const ModelParams& p, const std::string& initial_label,
                     const std::vector<double>& times, const EvolveOptions& opts) {
    return evolve(p, parse_state_label(p.space, initial_label), times, opts);
}

StateVector evolve_state(const ModelParams& p, const StateVector& initial, double t) {
    p.validate();
    if (initial.size() != p.space.dim()) {
        throw ParamError("evolve_state: initial state does not match the space dimension");
    }
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(build_hamiltonian(p));
    const auto& evals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    StateVector coeffs = vecs.adjoint() * initial;
    for (int k = 0; k < coeffs.size(); ++k) {
        coeffs(k) *= std::polar(1.0, -evals(k) * t);
    }
    return vecs * coeffs;
}

GhzPeak ghz_fidelity_peak(const ModelParams& p, const EvolveOptions& opts) {
    p.validate();
    if (p.space.n_qubits != 3 || p.qubits.size() != 3) {
        throw ParamError("ghz_fidelity_peak: needs 3 qubits");
    }
    // Window sized from the closed-form transfer rate: the peak of an ideal
    // quarter transfer sits at pi/(4 geff), well inside 0.7 periods.
    const std::vector<double> times = default_time_grid(p, 2048, 0.7);
    EvolveOptions run = opts;
    if (!run.target) run.target = ghz_superposition_target(p.space);
    const DynamicsTrace tr = evolve(p, "1,ggg", times, run);

    std::size_t best = 0;
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        if (tr.target_fidelity[i] > tr.target_fidelity[best]) best = i;
    }
    GhzPeak peak{tr.times[best], tr.target_fidelity[best]};
    if (best > 0 && best + 1 < tr.times.size()) {
        // Parabolic refinement through the three samples around the peak.
        const double y0 = tr.target_fidelity[best - 1];
        const double y1 = tr.target_fidelity[best];
        const double y2 = tr.target_fidelity[best + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            const double h = tr.times[best] - tr.times[best - 1];
            const double delta = 0.5 * h * (y0 - y2) / denom;
            peak.t_star = tr.times[best] + delta;
            peak.fidelity = y1 - 0.25 * (y0 - y2) * delta / h;
        }
    }
    return peak;
}

double rabi_period(const DynamicsTrace& trace) {
    const auto& y = trace.three_qubit_correlator;
    const auto& t = trace.times;
    if (y.size() < 8) throw InsufficientSpanError("rabi_period: trace too short");
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    const double range = *max_it - *min_it;
    if (range < 1e-6) {
        throw InsufficientSpanError("rabi_period: correlator is constant over the trace");
    }

    // Group samples above a crest threshold into runs; one peak per run keeps
    // small superimposed wiggles from splitting a crest.
    const double crest = *min_it + 0.6 * range;
    std::vector<double> peak_times;
    std::size_t i = 0;
    const std::size_t n = y.size();
    while (i < n) {
        if (y[i] < crest) {
            ++i;
            continue;
        }
        std::size_t j = i, best = i;
        while (j < n && y[j] >= crest) {
            if (y[j] > y[best]) best = j;
            ++j;
        }
        double t_peak = t[best];
        if (best > 0 && best + 1 < n) {
            const double denom = y[best - 1] - 2.0 * y[best] + y[best + 1];
            if (denom < 0.0) {
                t_peak = t[best] +
                         0.5 * (t[best] - t[best - 1]) * (y[best - 1] - y[best + 1]) / denom;
            }
        }
        peak_times.push_back(t_peak);
        i = j;
    }
    if (peak_times.size() < 2) {
        throw InsufficientSpanError(
            "rabi_period: trace spans fewer than two correlator maxima");
    }
    return peak_times[1] - peak_times[0];
}

} // namespace magq
