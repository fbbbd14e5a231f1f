#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "magq/model.hpp"

namespace magq {

struct SweepOptions {
    int n_points = 201;
    int n_levels = 16;
    bool check_convergence = true;
    int threads = 1;
};

// Ascending eigenvalues of H(omega0) over a strictly increasing omega0 grid.
struct SpectrumSweep {
    std::vector<double> omega0_grid;
    Eigen::MatrixXd levels; // n_points x n_levels, each row sorted ascending
    ModelParams params;
};

SpectrumSweep sweep(const ModelParams& p, double omega0_lo, double omega0_hi,
                    const SweepOptions& opts = {});

enum class GapKind { crossing, anticrossing };

struct GapFeature {
    double omega0_star = 0.0;
    double min_gap = 0.0;
    std::pair<int, int> level_pair{0, 0}; // ascending-sorted indices at omega0_star
    GapKind kind = GapKind::crossing;
};

// Which pair of levels to follow through the window. Either a fixed pair of
// sorted indices, or the two eigenvectors with the largest
// |<t1|v>|^2 + |<t2|v>|^2 (robust against spectator levels crossing through).
class LevelPairSelector {
public:
    static LevelPairSelector sorted_pair(int i, int j);
    static LevelPairSelector overlap(StateVector t1, StateVector t2);

    bool uses_overlap() const { return overlap_; }
    int index_i() const { return i_; }
    int index_j() const { return j_; }
    const StateVector& target1() const { return t1_; }
    const StateVector& target2() const { return t2_; }

private:
    LevelPairSelector() = default;
    bool overlap_ = false;
    int i_ = 0;
    int j_ = 0;
    StateVector t1_;
    StateVector t2_;
};

struct GapOptions {
    // Crossing/anticrossing classification threshold in units of the mean
    // qubit splitting.
    double crossing_threshold = 1e-8;
    int scan_points = 65;
    double rel_tol = 1e-10; // golden-section termination, relative in omega0
    bool check_convergence = true;
    double energy_shift = 0.0; // adds shift * I to H; gaps must not care
};

// Locate the minimal gap of the selected pair inside [lo, hi]. The window
// must contain exactly one candidate minimum: zero candidates raise
// NotFoundError, several raise AmbiguityError.
GapFeature find_gap(const ModelParams& p, double omega0_lo, double omega0_hi,
                    const LevelPairSelector& sel, const GapOptions& opts = {});

struct GeffExtraction {
    double geff = 0.0;        // half of the minimal |1,ggg>/|0,eee> gap
    double omega0_star = 0.0;
    GapFeature feature;
};

// Half-gap of the three-excitation anticrossing near omega0 ~ sum omega_q.
GeffExtraction extract_geff(const ModelParams& p, const GapOptions& opts = {});

struct GeffFitPoint {
    double g_R = 0.0;
    double g_CR = 0.0;
    double geff = 0.0;
    bool valid = false;
};

struct GeffFit {
    double c1 = 0.0; // coefficient of g_CR g_R^4 / omega_q^4
    double c2 = 0.0; // coefficient of g_CR^3 g_R^2 / omega_q^4
    double residual = 0.0; // relative L2 residual
    int n_used = 0;
    std::vector<GeffFitPoint> points;
};

// Least-squares fit of extracted half-gaps over the coupling grid to
// (c1 g_CR g_R^4 + c2 g_CR^3 g_R^2) / omega_q^4. Grid couplings must stay
// within the perturbative regime (<= 0.15 omega_q); failed extractions are
// skipped and at least 6 valid points are required.
GeffFit fit_geff_surface(const ModelParams& base, const std::vector<double>& gR_grid,
                         const std::vector<double>& gCR_grid,
                         const GapOptions& opts = {});

} // namespace magq
