#pragma once

#include <array>
#include <vector>

#include "magq/hilbert.hpp"

namespace magq {

// Declared conversion between the two supported energy conventions
// (E/h): 1 meV = 241.799 GHz.
inline constexpr double kGHzPerMeV = 241.799;

// Material-level inputs. All energies in one consistent unit; lengths in the
// same unit as `lattice_constant`.
struct MaterialParams {
    double exchange_J = 0.0;   // nearest-neighbour ferromagnetic exchange, > 0
    double spin_S = 0.5;       // spin magnitude per site
    double K_x = 0.0;          // single-ion anisotropy constants
    double K_y = 0.0;
    double K_z = 0.0;
    double zeeman = 0.0;       // |gamma| mu0 H0
    double lattice_constant = 1.0;
    long n_sites = 1;          // total ferromagnet sites N_F

    void validate() const;
};

// Quadratic-mode parameters (A, B) and the squeeze transform they induce.
struct SqueezeParams {
    double A = 0.0;
    double B = 0.0;
    double omega0 = 0.0; // eigenmode energy sqrt(A^2 - 4B^2)
    double r = 0.0;      // squeeze parameter, sinh r carries the sign of -B
    double cosh_r = 1.0;
    double sinh_r = 0.0;
};

struct CouplingParams {
    double j_int = 0.0;  // interfacial exchange
    long n_int = 0;      // interfacial site count
    double psi2 = 0.0;   // interface-averaged qubit probability |psi|^2
    double g = 0.0;      // bare coupling
    double g_R = 0.0;    // dressed rotating coupling g cosh r
    double g_CR = 0.0;   // dressed counter-rotating coupling g sinh r
    double delta_omega_q = 0.0; // qubit-splitting renormalization (additive)
};

struct QubitParams {
    double omega_q = 0.0;
    double g_R = 0.0;
    double g_CR = 0.0;
};

struct ModelParams {
    double omega0 = 0.0;
    std::vector<QubitParams> qubits;
    HilbertSpace space;

    void validate() const;
    bool identical_qubits(double rel_tol = 1e-12) const;
};

// A = zeeman + (K_x + K_y - 2 K_z) S, B = S (K_x - K_y) / 2, at k = 0.
std::pair<double, double> anisotropy_to_AB(const MaterialParams& m);

// Simple-cubic dispersion: A_k = A0 + 4 J S [3 - cos(kx a) - cos(ky a) - cos(kz a)],
// B_k = B0. `k` in inverse length units matching lattice_constant.
std::pair<double, double> magnon_dispersion(const MaterialParams& m,
                                            const std::array<double, 3>& k);

struct ModeSpacing {
    double spacing = 0.0;
    bool ok = false;
};

// Energy gap from the uniform mode to the first standing-wave mode of a
// magnet with linear size L sites; ok iff the gap exceeds `threshold`.
ModeSpacing check_single_mode(const MaterialParams& m, int L, double threshold);

// Diagonalize A a†a + B(a² + a†²). Throws StabilityError (naming the violated
// inequality) outside the stable domain A² > 4B², (A + ω₀)² > 4B².
SqueezeParams bogoliubov(double A, double B);

// g = J_int N_int |psi|² sqrt(S / (2 N_F)); delta_omega_q = -S J_int N_int |psi|².
CouplingParams bare_coupling(double j_int, long n_int, double psi2, double spin_S,
                             long n_sites_f);

// g_R = g cosh r, g_CR = g sinh r.
std::pair<double, double> dressed_couplings(double g, const SqueezeParams& sq);

// H = ω₀ α†α + Σ_n (ω_qn/2) σz_n
//       + Σ_n [ g_Rn (α†σ-_n + ασ+_n) + g_CRn (α†σ+_n + ασ-_n) ].
DenseOperator build_hamiltonian(const ModelParams& p);

// Lab-frame quadratic mode H_F = A a†a + B(a² + a†²), qubit factors identity.
// Used only to cross-validate the Bogoliubov route.
DenseOperator build_lab_frame_mode(const HilbertSpace& space, double A, double B);

// Total excitation number α†α + Σ σ+σ-, conserved when all g_CR vanish.
DenseOperator total_excitation_number(const HilbertSpace& space);

} // namespace magq
