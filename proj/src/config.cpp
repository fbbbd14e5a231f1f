#include "magq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace magq {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

const std::set<std::string> kSections{"material", "coupling", "model", "run"};

double parse_number(const std::string& token, const std::string& where) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParamError("config: expected a number for " + where + ", got '" + token + "'");
    }
    return v;
}

std::optional<RunConfig::EnergyUnit> parse_unit(const std::string& token) {
    const std::string t = lower(token);
    if (t == "ghz") return RunConfig::EnergyUnit::ghz;
    if (t == "mev") return RunConfig::EnergyUnit::mev;
    if (t == "wq") return RunConfig::EnergyUnit::model_units;
    return std::nullopt;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string at = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ParamError("config: malformed section at " + at);
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (!kSections.count(section)) {
                throw ParamError("config: unknown section [" + section + "] at " + at +
                                 " (expected material, coupling, model or run)");
            }
            cfg.sections_[section]; // sections may be empty
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParamError("config: expected 'key = value' at " + at);
        }
        if (section.empty()) {
            throw ParamError("config: key outside any [section] at " + at);
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParamError("config: empty key or value at " + at);
        }
        auto& sec = cfg.sections_[section];
        if (sec.count(key)) {
            throw ParamError("config: duplicate key '" + key + "' in [" + section + "] at " + at);
        }
        sec[key] = value;
    }
    return cfg;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string RunConfig::raw(const std::string& section, const std::string& key) {
    const auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key)) {
        throw ParamError("config: missing required key '" + key + "' in [" + section + "] (" +
                         origin_ + ")");
    }
    consumed_.insert(section + "." + key);
    return it->second.at(key);
}

std::string RunConfig::get_string(const std::string& section, const std::string& key) {
    return raw(section, key);
}

std::string RunConfig::get_string_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) {
    return has(section, key) ? raw(section, key) : fallback;
}

long RunConfig::get_long(const std::string& section, const std::string& key) {
    const std::string v = raw(section, key);
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParamError("config: expected an integer for '" + key + "' in [" + section +
                         "], got '" + v + "'");
    }
    return out;
}

long RunConfig::get_long_or(const std::string& section, const std::string& key, long fallback) {
    return has(section, key) ? get_long(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key) {
    return parse_number(raw(section, key), "'" + key + "' in [" + section + "]");
}

double RunConfig::get_double_or(const std::string& section, const std::string& key,
                                double fallback) {
    return has(section, key) ? get_double(section, key) : fallback;
}

bool RunConfig::get_bool_or(const std::string& section, const std::string& key, bool fallback) {
    if (!has(section, key)) return fallback;
    const std::string v = lower(raw(section, key));
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ParamError("config: expected a boolean for '" + key + "' in [" + section +
                     "], got '" + v + "'");
}

RunConfig::Energy RunConfig::parse_energy_text(const std::string& text,
                                               const std::string& where) {
    auto tokens = split_ws(text);
    if (tokens.empty()) throw ParamError("config: empty value for " + where);
    EnergyUnit unit = EnergyUnit::model_units;
    if (tokens.size() > 1) {
        if (const auto u = parse_unit(tokens.back())) {
            unit = *u;
            tokens.pop_back();
        }
    }
    if (tokens.size() != 1) {
        throw ParamError("config: expected a single energy for " + where);
    }
    return {parse_number(tokens.front(), where), unit};
}

RunConfig::Energy RunConfig::get_energy(const std::string& section, const std::string& key) {
    auto list = get_energy_list(section, key);
    if (list.size() != 1) {
        throw ParamError("config: expected a single energy for '" + key + "' in [" + section +
                         "]");
    }
    return list.front();
}

std::optional<RunConfig::Energy> RunConfig::get_energy_opt(const std::string& section,
                                                           const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    return get_energy(section, key);
}

std::vector<RunConfig::Energy> RunConfig::get_energy_list(const std::string& section,
                                                          const std::string& key) {
    const std::string where = "'" + key + "' in [" + section + "]";
    auto tokens = split_ws(raw(section, key));
    if (tokens.empty()) throw ParamError("config: empty value for " + where);
    EnergyUnit unit = EnergyUnit::model_units;
    if (const auto u = parse_unit(tokens.back())) {
        unit = *u;
        tokens.pop_back();
        if (tokens.empty()) throw ParamError("config: unit without a number for " + where);
    }
    std::vector<Energy> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back({parse_number(t, where), unit});
    return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& section,
                                               const std::string& key) {
    const std::string where = "'" + key + "' in [" + section + "]";
    const auto tokens = split_ws(raw(section, key));
    std::vector<double> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(parse_number(t, where));
    return out;
}

void RunConfig::reject_unknown() const {
    for (const auto& [section, entries] : sections_) {
        for (const auto& [key, value] : entries) {
            if (!consumed_.count(section + "." + key)) {
                throw ParamError("config: unknown key '" + key + "' in [" + section + "] (" +
                                 origin_ + ")");
            }
        }
    }
}

} // namespace magq
