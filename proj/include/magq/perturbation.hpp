#pragma once

#include <array>
#include <vector>

#include "magq/errors.hpp"

namespace magq {

// Closed-form effective coupling between |1,ggg> and |0,eee> from
// high-order perturbation theory in the qubit-mode interaction.
//
// Sign convention: amplitudes are built from energy denominators
// (E_initial - E_virtual); only |g_eff| is observable (the anticrossing gap
// is 2|g_eff|), so tests on sign-ambiguous quantities compare magnitudes.

struct PertInputs {
    double omega0 = 0.0;
    std::array<double, 3> omega_q{};
    std::array<double, 3> g_R{};
    std::array<double, 3> g_CR{};

    static PertInputs identical(double omega0, double omega_q, double g_R, double g_CR);
    bool is_identical(double rel_tol = 1e-9) const;
    bool at_resonance(double rel_tol = 1e-9) const; // omega0 == sum of omega_q
};

// Third order, general qubits: permutation sum over the two three-step paths.
// Vanishes identically when omega0 = sum_i omega_qi.
double geff3_general(const PertInputs& in);

// Same sum with a per-term breakdown; `scale` is the largest |term|, useful
// for judging cancellation quality.
struct Geff3Breakdown {
    double value = 0.0;
    double scale = 0.0;
    std::vector<double> terms;
};
Geff3Breakdown geff3_general_breakdown(const PertInputs& in);

// Identical qubits: 3 g_R² g_CR (omega0 - 3 omega_q) / (omega_q (omega0² - omega_q²)).
double geff3_identical(double omega0, double omega_q, double g_R, double g_CR);

// Fifth order, identical qubits at omega0 = 3 omega_q:
// -9 (3 g_CR³ g_R² - 8 g_CR g_R⁴) / (32 omega_q⁴).
double geff5_identical_resonance(double g_R, double g_CR, double omega_q);

// Per-family fifth-order diagram sums. The two loop-insertion families
// (5a+5c, 5b+5d) enter with the renormalization-term minus sign; the family
// total reproduces geff5_identical_resonance for identical qubits at
// resonance. Non-identical or off-resonance evaluation is unvalidated and
// must be requested with experimental = true.
struct Geff5Families {
    double f5ac = 0.0;
    double f5bd = 0.0;
    double f5e = 0.0;
    double f5f = 0.0;
    double f5g = 0.0;
    double total() const { return f5ac + f5bd + f5e + f5f + f5g; }
};
Geff5Families geff5_diagrams(const PertInputs& in, bool experimental = false);

// Level shifts move the crossing to omega0 = 3 w_q + 3 g_CR²/(2 w_q) - 3 g_R²/w_q.
double crossing_shift(double g_R, double g_CR, double omega_q);

// Third-order contribution re-evaluated at the shifted crossing, kept to
// fifth order in the couplings: 9 (g_CR³ g_R² - 2 g_CR g_R⁴) / (16 omega_q⁴).
double geff3_shifted(double g_R, double g_CR, double omega_q);

// Total at the (anti-)crossing: geff5_identical_resonance + geff3_shifted
// = (9/8) g_CR g_R⁴/w_q⁴ - (9/32) g_CR³ g_R²/w_q⁴. Roots at
// g_CR = ±sqrt(8/3) g_R (fifth order), ±sqrt(2) g_R (shifted third order),
// ±2 g_R (total).
double geff_total_resonance(double g_R, double g_CR, double omega_q);

// Aggregate breakdown used by the CLI `pert` command. g3 is evaluated at
// in.omega0; the other entries are resonance quantities. `value` equals
// geff_total_resonance for identical qubits and is NaN otherwise.
struct PertResult {
    double value = 0.0;
    double g3 = 0.0;
    Geff5Families g5;
    double g3_shifted = 0.0;
    double omega0_crossing = 0.0;
};
PertResult evaluate_effective_coupling(const PertInputs& in, bool experimental = false);

} // namespace magq
