#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magq/model.hpp"

namespace magq {

// Unitary evolution exp(-iHt)|psi0> via one spectral decomposition of H,
// exact to solver precision at arbitrary times.
struct DynamicsTrace {
    std::vector<double> times;
    std::vector<double> magnon_number;                 // <a†a>
    std::vector<std::vector<double>> qubit_excitation; // [qubit][time], <sigma+ sigma->
    std::vector<double> three_qubit_correlator;        // all-qubits-excited population
    std::vector<double> target_fidelity;               // |<target|psi(t)>|^2
    std::vector<double> norm;                          // ||psi(t)||, unitarity diagnostic
    std::vector<double> energy;                        // <H>, conserved diagnostic
};

struct EvolveOptions {
    // Fidelity target; defaults to the equal-weight |1,g..g>/|0,e..e>
    // superposition for 3 qubits and to the initial state otherwise.
    std::optional<StateVector> target;
    bool check_convergence = true;
};

DynamicsTrace evolve(const ModelParams& p, const StateVector& initial,
                     const std::vector<double>& times, const EvolveOptions& opts = {});

DynamicsTrace evolve(const ModelParams& p, const std::string& initial_label,
                     const std::vector<double>& times, const EvolveOptions& opts = {});

// Single application of exp(-iHt); t may be negative (reverse propagation).
StateVector evolve_state(const ModelParams& p, const StateVector& initial, double t);

// (|1,g..g> - i |0,e..e>)/sqrt(2): the state reached at quarter transfer of
// an ideal two-level Rabi cycle with positive effective coupling.
StateVector ghz_superposition_target(const HilbertSpace& space);

// Uniform grid of `n_points` over `span_periods` estimated Rabi periods
// (period = pi / |g_eff|, with g_eff from the closed-form resonance total).
std::vector<double> default_time_grid(const ModelParams& p, int n_points = 2048,
                                      double span_periods = 1.2);

struct GhzPeak {
    double t_star = 0.0;
    double fidelity = 0.0;
};

// Peak fidelity to ghz_superposition_target over the first Rabi period,
// starting from |1,ggg>. The model must sit at the three-excitation
// resonance for the peak to approach 1.
GhzPeak ghz_fidelity_peak(const ModelParams& p, const EvolveOptions& opts = {});

// Oscillation period from the first two maxima of the three-qubit
// correlator (parabolic refinement of sampled peaks). Throws
// InsufficientSpanError if the trace does not span two maxima.
double rabi_period(const DynamicsTrace& trace);

} // namespace magq
