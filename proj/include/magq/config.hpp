#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "magq/errors.hpp"

namespace magq {

// Plain-text run configuration:
//
//   # comment
//   [model]
//   omega_q = 1.0          # plain numbers are in model units (omega_q)
//   g_r = 0.1
//   zeeman = 12.5 GHz      # explicit absolute units: GHz or meV
//
// Recognized sections: material, coupling, model, run. Every key must be
// consumed by the command that runs; leftovers are reported as unknown keys.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text, const std::string& origin = "<string>");

    enum class EnergyUnit { model_units, ghz, mev };
    struct Energy {
        double value = 0.0;
        EnergyUnit unit = EnergyUnit::model_units;
    };

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key);
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback);
    long get_long(const std::string& section, const std::string& key);
    long get_long_or(const std::string& section, const std::string& key, long fallback);
    double get_double(const std::string& section, const std::string& key);
    double get_double_or(const std::string& section, const std::string& key, double fallback);
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback);

    // "0.1", "0.1 GHz", "1 meV"; a trailing unit token applies to the whole list.
    static Energy parse_energy_text(const std::string& text, const std::string& where);
    Energy get_energy(const std::string& section, const std::string& key);
    std::optional<Energy> get_energy_opt(const std::string& section, const std::string& key);
    std::vector<Energy> get_energy_list(const std::string& section, const std::string& key);
    std::vector<double> get_double_list(const std::string& section, const std::string& key);

    // Throws ParamError naming the first key no command consumed.
    void reject_unknown() const;

private:
    std::string raw(const std::string& section, const std::string& key);
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::set<std::string> consumed_; // "section.key"
    std::string origin_;
};

} // namespace magq
