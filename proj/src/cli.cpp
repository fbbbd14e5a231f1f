#include "magq/cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "magq/config.hpp"
#include "magq/dynamics.hpp"
#include "magq/model.hpp"
#include "magq/perturbation.hpp"
#include "magq/spectrum.hpp"

namespace magq::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<int> n_max;
    std::optional<int> threads;
};

// --- unit resolution -------------------------------------------------------

double to_ghz(const RunConfig::Energy& e, const std::string& key) {
    switch (e.unit) {
    case RunConfig::EnergyUnit::ghz:
        return e.value;
    case RunConfig::EnergyUnit::mev:
        return e.value * kGHzPerMeV;
    case RunConfig::EnergyUnit::model_units:
        break;
    }
    throw ParamError("config: '" + key + "' needs an explicit unit (GHz or meV)");
}

struct LoadedModel {
    ModelParams params;
    bool omega0_auto = false;
    // Set when the model block was given in absolute units; model units are
    // then omega_q-relative with this many GHz per unit.
    std::optional<double> scale_ghz;
};

// Model-unit resolution: plain numbers pass through; absolute entries are
// divided by the (absolute) mean qubit splitting.
double resolve(const RunConfig::Energy& e, const std::optional<double>& scale_ghz,
               const std::string& key) {
    if (e.unit == RunConfig::EnergyUnit::model_units) return e.value;
    if (!scale_ghz) {
        throw ParamError("config: '" + key +
                         "' uses absolute units but omega_q does not; give omega_q in "
                         "GHz or meV as well");
    }
    return to_ghz(e, key) / *scale_ghz;
}

std::vector<double> broadcast(std::vector<double> values, std::size_t n,
                              const std::string& key) {
    if (values.size() == 1) return std::vector<double>(n, values.front());
    if (values.size() != n) {
        throw ParamError("config: '" + key + "' must list 1 or " + std::to_string(n) +
                         " values");
    }
    return values;
}

LoadedModel load_model(RunConfig& cfg, const GlobalOptions& opts) {
    LoadedModel m;
    const int n_qubits = static_cast<int>(cfg.get_long_or("model", "n_qubits", 3));
    int n_max = static_cast<int>(cfg.get_long_or("model", "n_max", 10));
    if (opts.n_max) n_max = *opts.n_max;
    m.params.space = build_space(n_max, n_qubits);
    const auto nq = static_cast<std::size_t>(n_qubits);

    auto wq_list = cfg.has("model", "omega_q")
                       ? cfg.get_energy_list("model", "omega_q")
                       : std::vector<RunConfig::Energy>{{1.0, RunConfig::EnergyUnit::model_units}};
    if (wq_list.front().unit != RunConfig::EnergyUnit::model_units) {
        double mean = 0.0;
        for (const auto& e : wq_list) mean += to_ghz(e, "omega_q") / wq_list.size();
        m.scale_ghz = mean;
    }
    std::vector<double> wq;
    for (const auto& e : wq_list) wq.push_back(resolve(e, m.scale_ghz, "omega_q"));
    wq = broadcast(std::move(wq), nq, "omega_q");

    auto energies = [&](const char* key, double fallback) {
        if (!cfg.has("model", key)) return std::vector<double>(nq, fallback);
        std::vector<double> out;
        for (const auto& e : cfg.get_energy_list("model", key)) {
            out.push_back(resolve(e, m.scale_ghz, key));
        }
        return broadcast(std::move(out), nq, key);
    };
    const auto gr = energies("g_r", 0.0);
    const auto gcr = energies("g_cr", 0.0);
    for (std::size_t i = 0; i < nq; ++i) {
        m.params.qubits.push_back({wq[i], gr[i], gcr[i]});
    }

    const std::string w0 = cfg.get_string_or("model", "omega0", "auto");
    if (w0 == "auto") {
        m.omega0_auto = true;
        m.params.omega0 =
            std::accumulate(wq.begin(), wq.end(), 0.0); // placeholder at resonance
    } else {
        const auto e = RunConfig::parse_energy_text(w0, "'omega0' in [model]");
        m.params.omega0 = resolve(e, m.scale_ghz, "omega0");
    }
    m.params.validate();
    return m;
}

// --- output helpers --------------------------------------------------------

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParamError("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

StateVector symmetric_excitation_state(const HilbertSpace& space, int n_excited) {
    StateVector v = StateVector::Zero(space.dim());
    int count = 0;
    for (unsigned bits = 0; bits < (1u << space.n_qubits); ++bits) {
        if (std::popcount(bits) == n_excited) {
            v(space.index_of(0, bits)) += 1.0;
            ++count;
        }
    }
    return v / std::sqrt(static_cast<double>(count));
}

const char* kind_name(GapKind k) {
    return k == GapKind::crossing ? "crossing" : "anticrossing";
}

json feature_to_json(const std::string& label, const GapFeature& f) {
    json j;
    j["label"] = label;
    j["omega0_star"] = f.omega0_star;
    j["min_gap"] = f.min_gap;
    j["kind"] = kind_name(f.kind);
    j["level_pair"] = {f.level_pair.first, f.level_pair.second};
    return j;
}

double mean_omega_q(const ModelParams& p) {
    double s = 0.0;
    for (const auto& q : p.qubits) s += q.omega_q;
    return s / static_cast<double>(p.qubits.size());
}

double mean_of(const ModelParams& p, double QubitParams::* field) {
    double s = 0.0;
    for (const auto& q : p.qubits) s += q.*field;
    return s / static_cast<double>(p.qubits.size());
}

// --- subcommands -----------------------------------------------------------

int cmd_spectrum(RunConfig& cfg, const GlobalOptions& opts, std::ostream& out) {
    LoadedModel m = load_model(cfg, opts);
    const double lo = resolve(cfg.get_energy("run", "omega0_lo"), m.scale_ghz, "omega0_lo");
    const double hi = resolve(cfg.get_energy("run", "omega0_hi"), m.scale_ghz, "omega0_hi");

    SweepOptions sw;
    sw.n_points = static_cast<int>(cfg.get_long_or("run", "n_points", 601));
    sw.n_levels = static_cast<int>(cfg.get_long_or("run", "n_levels", 16));
    sw.check_convergence = cfg.get_bool_or("run", "check_convergence", true);
    sw.threads = opts.threads.value_or(
        static_cast<int>(cfg.get_long_or("run", "threads", 1)));

    GapOptions gap_opts;
    gap_opts.crossing_threshold =
        cfg.get_double_or("run", "crossing_threshold", gap_opts.crossing_threshold);
    gap_opts.check_convergence = sw.check_convergence;

    std::vector<std::string> gap_labels;
    if (cfg.has("run", "gaps")) {
        std::istringstream iss(cfg.get_string("run", "gaps"));
        std::string tok;
        while (iss >> tok) gap_labels.push_back(tok);
    }
    cfg.reject_unknown();

    const SpectrumSweep sweep_result = sweep(m.params, lo, hi, sw);

    std::ostringstream csv;
    csv << "omega0";
    for (int l = 0; l < sw.n_levels; ++l) csv << ",E_" << l;
    csv << "\n";
    for (int i = 0; i < sw.n_points; ++i) {
        csv << format_double(sweep_result.omega0_grid[static_cast<std::size_t>(i)]);
        for (int l = 0; l < sw.n_levels; ++l) {
            csv << "," << format_double(sweep_result.levels(i, l));
        }
        csv << "\n";
    }
    write_text(fs::path(opts.out_dir) / "spectrum.csv", csv.str());

    json gaps = json::array();
    const double wq = mean_omega_q(m.params);
    for (const auto& label : gap_labels) {
        GapFeature f;
        if (label == "one_excitation") {
            const auto sel = LevelPairSelector::overlap(
                basis_state(m.params.space, 1,
                            std::string(static_cast<std::size_t>(m.params.space.n_qubits), 'g')),
                symmetric_excitation_state(m.params.space, 1));
            f = find_gap(m.params, 0.7 * wq, 1.3 * wq, sel, gap_opts);
        } else if (label == "two_excitation") {
            if (m.params.space.n_qubits < 2) {
                throw ParamError("gap preset two_excitation needs at least 2 qubits");
            }
            const auto sel = LevelPairSelector::overlap(
                basis_state(m.params.space, 1,
                            std::string(static_cast<std::size_t>(m.params.space.n_qubits), 'g')),
                symmetric_excitation_state(m.params.space, 2));
            f = find_gap(m.params, 1.8 * wq, 2.2 * wq, sel, gap_opts);
        } else if (label == "three_excitation") {
            f = extract_geff(m.params, gap_opts).feature;
        } else {
            throw ParamError("unknown gap preset '" + label +
                             "' (expected one_excitation, two_excitation or "
                             "three_excitation)");
        }
        gaps.push_back(feature_to_json(label, f));
    }
    write_json(fs::path(opts.out_dir) / "gaps.json", gaps);
    out << "wrote spectrum.csv and gaps.json to " << opts.out_dir << "\n";
    return 0;
}

int cmd_dynamics(RunConfig& cfg, const GlobalOptions& opts, std::ostream& out) {
    LoadedModel m = load_model(cfg, opts);
    const std::string initial = cfg.get_string_or("run", "initial", "1,ggg");
    const int n_times = static_cast<int>(cfg.get_long_or("run", "n_times", 2048));
    const double span_periods = cfg.get_double_or("run", "span_periods", 1.75);
    const bool check_conv = cfg.get_bool_or("run", "check_convergence", true);
    cfg.reject_unknown();
    if (n_times < 8) throw ParamError("dynamics: n_times must be >= 8");
    if (!(span_periods > 0.0)) throw ParamError("dynamics: span_periods must be > 0");

    GapOptions gap_opts;
    gap_opts.check_convergence = check_conv;

    double geff_est = std::abs(geff_total_resonance(
        mean_of(m.params, &QubitParams::g_R), mean_of(m.params, &QubitParams::g_CR),
        mean_omega_q(m.params)));
    if (m.omega0_auto && m.params.space.n_qubits == 3 && geff_est > 0.0) {
        const GeffExtraction ex = extract_geff(m.params, gap_opts);
        m.params.omega0 = ex.omega0_star;
        geff_est = ex.geff;
    }

    const double period_est =
        geff_est > 0.0 ? M_PI / geff_est : 1e4 * 2.0 * M_PI / mean_omega_q(m.params);
    std::vector<double> times(static_cast<std::size_t>(n_times));
    for (int i = 0; i < n_times; ++i) {
        times[static_cast<std::size_t>(i)] = span_periods * period_est * i / (n_times - 1);
    }

    EvolveOptions ev;
    ev.check_convergence = check_conv;
    const DynamicsTrace tr = evolve(m.params, initial, times, ev);

    std::ostringstream csv;
    csv << "t,n_magnon";
    for (int q = 1; q <= m.params.space.n_qubits; ++q) csv << ",p_q" << q;
    csv << ",p_eee,fidelity\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        csv << format_double(tr.times[i]) << "," << format_double(tr.magnon_number[i]);
        for (int q = 0; q < m.params.space.n_qubits; ++q) {
            csv << "," << format_double(tr.qubit_excitation[static_cast<std::size_t>(q)][i]);
        }
        csv << "," << format_double(tr.three_qubit_correlator[i]) << ","
            << format_double(tr.target_fidelity[i]) << "\n";
    }
    write_text(fs::path(opts.out_dir) / "trace.csv", csv.str());

    json summary;
    try {
        summary["period"] = rabi_period(tr);
    } catch (const InsufficientSpanError&) {
        summary["period"] = nullptr;
    }
    if (m.params.space.n_qubits == 3 && geff_est > 0.0) {
        const GhzPeak peak = ghz_fidelity_peak(m.params, ev);
        summary["t_star"] = peak.t_star;
        summary["fidelity"] = peak.fidelity;
    } else {
        summary["t_star"] = nullptr;
        summary["fidelity"] = nullptr;
    }
    summary["omega0"] = m.params.omega0;
    summary["geff"] = geff_est;
    write_json(fs::path(opts.out_dir) / "summary.json", summary);
    out << "wrote trace.csv and summary.json to " << opts.out_dir << "\n";
    return 0;
}

int cmd_pert(RunConfig& cfg, const GlobalOptions& opts, std::ostream& out) {
    // Pure closed forms; no Hilbert space involved.
    const long n_qubits = cfg.get_long_or("model", "n_qubits", 3);
    if (n_qubits != 3) throw ParamError("pert: defined for 3 qubits");
    auto values = [&](const char* key, double fallback) {
        std::vector<double> v{fallback};
        if (cfg.has("model", key)) {
            v.clear();
            for (const auto& e : cfg.get_energy_list("model", key)) {
                if (e.unit != RunConfig::EnergyUnit::model_units) {
                    throw ParamError("pert: '" + std::string(key) +
                                     "' must be in omega_q-relative units");
                }
                v.push_back(e.value);
            }
        }
        return broadcast(std::move(v), 3, key);
    };
    const auto wq = values("omega_q", 1.0);
    const auto gr = values("g_r", 0.0);
    const auto gcr = values("g_cr", 0.0);

    PertInputs in;
    std::copy(wq.begin(), wq.end(), in.omega_q.begin());
    std::copy(gr.begin(), gr.end(), in.g_R.begin());
    std::copy(gcr.begin(), gcr.end(), in.g_CR.begin());
    const std::string w0 = cfg.get_string_or("model", "omega0", "auto");
    if (w0 == "auto") {
        in.omega0 = wq[0] + wq[1] + wq[2];
    } else {
        const auto e = RunConfig::parse_energy_text(w0, "'omega0' in [model]");
        if (e.unit != RunConfig::EnergyUnit::model_units) {
            throw ParamError("pert: 'omega0' must be in omega_q-relative units");
        }
        in.omega0 = e.value;
    }
    const bool experimental = cfg.get_bool_or("run", "experimental", false);
    cfg.reject_unknown();

    const PertResult res = evaluate_effective_coupling(in, experimental);
    json j;
    j["omega0"] = in.omega0;
    j["omega_q"] = wq;
    j["g_r"] = gr;
    j["g_cr"] = gcr;
    j["g3"] = res.g3;
    j["g5_families"] = {{"f5ac", res.g5.f5ac}, {"f5bd", res.g5.f5bd}, {"f5e", res.g5.f5e},
                        {"f5f", res.g5.f5f},   {"f5g", res.g5.f5g},   {"total", res.g5.total()}};
    j["g3_shifted"] = res.g3_shifted;
    j["total"] = res.value;
    j["omega0_crossing"] = res.omega0_crossing;
    write_json(fs::path(opts.out_dir) / "pert.json", j);
    out << "wrote pert.json to " << opts.out_dir << "\n";
    return 0;
}

int cmd_estimate(RunConfig& cfg, const GlobalOptions& opts, std::ostream& out) {
    MaterialParams mat;
    mat.exchange_J = to_ghz(cfg.get_energy("material", "j"), "j");
    mat.spin_S = cfg.get_double("material", "s");
    mat.K_x = cfg.has("material", "k_x") ? to_ghz(cfg.get_energy("material", "k_x"), "k_x") : 0.0;
    mat.K_y = cfg.has("material", "k_y") ? to_ghz(cfg.get_energy("material", "k_y"), "k_y") : 0.0;
    mat.K_z = cfg.has("material", "k_z") ? to_ghz(cfg.get_energy("material", "k_z"), "k_z") : 0.0;
    mat.zeeman = to_ghz(cfg.get_energy("material", "zeeman"), "zeeman");
    mat.lattice_constant = cfg.get_double_or("material", "lattice_constant_nm", 1.0);
    mat.n_sites = cfg.get_long("material", "n_f");

    const double j_int = to_ghz(cfg.get_energy("coupling", "j_int"), "j_int");
    const long n_int = cfg.get_long("coupling", "n_int");
    const double psi2 = cfg.get_double("coupling", "psi2");

    const int L = static_cast<int>(cfg.get_long_or("run", "l", 100));
    const double factor = cfg.get_double_or("run", "spacing_threshold_factor", 5.0);
    cfg.reject_unknown();

    const auto [A, B] = anisotropy_to_AB(mat);
    const SqueezeParams sq = bogoliubov(A, B);
    CouplingParams cp = bare_coupling(j_int, n_int, psi2, mat.spin_S, mat.n_sites);
    std::tie(cp.g_R, cp.g_CR) = dressed_couplings(cp.g, sq);
    const ModeSpacing spacing = check_single_mode(
        mat, L, factor * std::max(std::abs(cp.g_R), std::abs(cp.g_CR)));

    json j;
    j["units"] = "GHz";
    j["a"] = A;
    j["b"] = B;
    j["omega0"] = sq.omega0;
    j["r"] = sq.r;
    j["cosh_r"] = sq.cosh_r;
    j["sinh_r"] = sq.sinh_r;
    j["g"] = cp.g;
    j["g_r"] = cp.g_R;
    j["g_cr"] = cp.g_CR;
    j["delta_omega_q"] = cp.delta_omega_q;
    j["g_over_j_int"] = cp.g / j_int;
    j["mode_spacing"] = spacing.spacing;
    j["mode_spacing_ok"] = spacing.ok;
    j["assumptions"] = {
        "energies are E/h; 1 meV = 241.799 GHz",
        "simple cubic lattice, quadratic dispersion coefficient 2 J S a^2",
        "g = J_int N_int |psi|^2 sqrt(S/(2 N_F)); delta_omega_q = -S J_int N_int |psi|^2",
        "delta_omega_q is reported, not folded into the qubit splitting",
        "mode spacing from the first standing wave along a side of L sites"};
    write_json(fs::path(opts.out_dir) / "estimate.json", j);
    out << "wrote estimate.json to " << opts.out_dir << "\n";
    return 0;
}

int cmd_fit(RunConfig& cfg, const GlobalOptions& opts, std::ostream& out) {
    LoadedModel m = load_model(cfg, opts);
    const auto gr_grid = cfg.get_double_list("run", "g_r_grid");
    const auto gcr_grid = cfg.get_double_list("run", "g_cr_grid");
    GapOptions gap_opts;
    gap_opts.check_convergence = cfg.get_bool_or("run", "check_convergence", true);
    cfg.reject_unknown();

    const GeffFit fit = fit_geff_surface(m.params, gr_grid, gcr_grid, gap_opts);
    json j;
    j["c1"] = fit.c1;
    j["c2"] = fit.c2;
    j["residual"] = fit.residual;
    j["n_used"] = fit.n_used;
    j["perturbative_c1"] = 9.0 / 8.0;
    j["perturbative_c2"] = -9.0 / 32.0;
    json pts = json::array();
    for (const auto& pt : fit.points) {
        pts.push_back({{"g_r", pt.g_R},
                       {"g_cr", pt.g_CR},
                       {"geff", pt.valid ? json(pt.geff) : json(nullptr)}});
    }
    j["points"] = pts;
    write_json(fs::path(opts.out_dir) / "fit.json", j);
    out << "wrote fit.json to " << opts.out_dir << "\n";
    return 0;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"squeezed-mode / spin-qubit model: spectra, gaps, dynamics and the "
                 "effective-coupling oracle"};
    app.require_subcommand(1);

    GlobalOptions opts;
    int n_max_flag = 0;
    int threads_flag = 0;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "configuration file")->required();
        sub->add_option("--out", opts.out_dir, "output directory (default .)");
        sub->add_option("--n-max", n_max_flag, "override the Fock cutoff");
        sub->add_option("--threads", threads_flag, "sweep worker threads");
    };
    CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalue sweep and gap features");
    CLI::App* dynamics_cmd = app.add_subcommand("dynamics", "time evolution from a basis state");
    CLI::App* pert_cmd = app.add_subcommand("pert", "closed-form effective-coupling breakdown");
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit extracted couplings over a grid");
    CLI::App* estimate_cmd = app.add_subcommand("estimate", "material-level parameter estimate");
    for (auto* sub : {spectrum_cmd, dynamics_cmd, pert_cmd, fit_cmd, estimate_cmd}) {
        add_common(sub);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (n_max_flag > 0) opts.n_max = n_max_flag;
    if (threads_flag > 0) opts.threads = threads_flag;

    try {
        std::filesystem::create_directories(opts.out_dir);
        RunConfig cfg = RunConfig::from_file(opts.config_path);
        if (spectrum_cmd->parsed()) return cmd_spectrum(cfg, opts, out);
        if (dynamics_cmd->parsed()) return cmd_dynamics(cfg, opts, out);
        if (pert_cmd->parsed()) return cmd_pert(cfg, opts, out);
        if (fit_cmd->parsed()) return cmd_fit(cfg, opts, out);
        if (estimate_cmd->parsed()) return cmd_estimate(cfg, opts, out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const ParamError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const StabilityError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const AmbiguityError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const SingularityError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const InsufficientSpanError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace magq::cli
