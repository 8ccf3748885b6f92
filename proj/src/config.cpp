#include "ucpd/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ucpd {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class KeyValueFile {
public:
    KeyValueFile(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin_ + ": line " + std::to_string(number) +
                                  " is not of the form key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin_ + ": empty key at line " + std::to_string(number));
            if (auto it = entries_.find(key); it != entries_.end())
                throw ConfigError(origin_ + ": duplicate key '" + key + "' at line " +
                                  std::to_string(number) + " (first at line " +
                                  std::to_string(it->second.line) + ")");
            entries_[key] = Entry{value, number, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    std::string require_string(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
        it->second.used = true;
        return it->second.value;
    }

    double get_real(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return parse_real(key, get_string(key, ""));
    }

    double require_real(const std::string& key) { return parse_real(key, require_string(key)); }

    long long get_int(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        return parse_int(key, get_string(key, ""));
    }

    long long require_int(const std::string& key) { return parse_int(key, require_string(key)); }

    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) {
        if (!has(key)) return fallback;
        std::vector<int> out;
        for (const auto& item : split_list(get_string(key, "")))
            out.push_back(static_cast<int>(parse_int(key, item)));
        return out;
    }

    std::vector<double> get_real_list(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const auto& item : split_list(get_string(key, "")))
            out.push_back(parse_real(key, item));
        return out;
    }

    // every key must have been consumed by a typed getter
    void reject_unknown() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used)
                throw ConfigError(origin_ + ": unknown key '" + key + "' at line " +
                                  std::to_string(entry.line));
    }

    // keys under "prefix.", with the prefix stripped, re-serialized as text
    std::string extract_prefixed(const std::string& prefix) {
        std::string out;
        for (auto& [key, entry] : entries_) {
            if (key.rfind(prefix, 0) == 0) {
                out += key.substr(prefix.size()) + " = " + entry.value + "\n";
                entry.used = true;
            }
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> items;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) items.push_back(item);
        return items;
    }

    double parse_real(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key '" + key + "' has non-numeric value '" + value + "'");
        }
    }

    long long parse_int(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key '" + key + "' has non-integer value '" + value + "'");
        }
    }

    std::map<std::string, Entry> entries_;
    std::string origin_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string dirname(const std::string& path) {
    const auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

ScenarioSpec parse_scenario_kv(KeyValueFile& kv) {
    ScenarioSpec spec;
    spec.layer_sizes = kv.get_int_list("layers", spec.layer_sizes);
    spec.actions = static_cast<int>(kv.get_int("actions", spec.actions));
    spec.mdp_seed = static_cast<std::uint64_t>(kv.get_int("mdp_seed", 1));
    spec.loss_kind = kv.get_string("loss_kind", spec.loss_kind);
    spec.loss_seed = static_cast<std::uint64_t>(kv.get_int("loss_seed", 2));
    spec.loss_period = static_cast<int>(kv.get_int("loss_period", 0));
    spec.cons_count = static_cast<int>(kv.get_int("cons_count", spec.cons_count));
    spec.cons_seed = static_cast<std::uint64_t>(kv.get_int("cons_seed", 3));
    spec.cons_sup = kv.get_real("cons_sup", spec.cons_sup);
    spec.cons_noise = kv.get_real("cons_noise", spec.cons_noise);
    spec.cons_quantile = kv.get_real("cons_quantile", spec.cons_quantile);
    spec.thresholds = kv.get_real_list("thresholds", {});
    spec.slater_slack = kv.get_real("slater_slack", 0.0);
    kv.reject_unknown();
    return spec;
}

}  // namespace

ScenarioSpec parse_scenario_file(const std::string& path) {
    KeyValueFile kv(read_file(path), path);
    return parse_scenario_kv(kv);
}

RunConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    KeyValueFile kv(text, "config");
    RunConfig cfg;
    cfg.horizon = static_cast<int>(kv.require_int("T"));
    if (cfg.horizon < 1) throw ConfigError("config: T must be >= 1");
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

    const std::string schedule = kv.get_string("schedule", "theorem");
    if (schedule == "theorem") {
        cfg.theorem_schedule = true;
    } else if (schedule == "explicit") {
        cfg.theorem_schedule = false;
        cfg.v_weight = kv.require_real("V");
        cfg.alpha = kv.require_real("alpha");
        cfg.lambda = kv.require_real("lambda");
        if (cfg.lambda < 0.0 || cfg.lambda >= 1.0) throw ConfigError("config: lambda out of [0,1)");
    } else {
        throw ConfigError("config: schedule must be 'theorem' or 'explicit'");
    }

    cfg.zeta = kv.require_real("zeta");
    if (cfg.zeta <= 0.0 || cfg.zeta >= 1.0) throw ConfigError("config: zeta out of (0,1)");

    cfg.known_model = kv.get_int("known_model", 0) != 0;
    cfg.known_model_epsilon = kv.get_real("known_model_epsilon", 1e-7);
    cfg.solver.grad_tol = kv.get_real("solver_tol", cfg.solver.grad_tol);
    cfg.solver.max_iterations =
        static_cast<int>(kv.get_int("solver_max_iters", cfg.solver.max_iterations));
    cfg.trace_every = static_cast<int>(kv.get_int("trace_every", 0));

    const std::string scenario_file = kv.get_string("scenario_file", "");
    const std::string inline_scenario = kv.extract_prefixed("scenario.");
    if (!scenario_file.empty() && !inline_scenario.empty())
        throw ConfigError("config: give either scenario_file or inline scenario.* keys, not both");
    if (!scenario_file.empty()) {
        const std::string full = scenario_file.front() == '/'
                                     ? scenario_file
                                     : base_dir + "/" + scenario_file;
        cfg.scenario = parse_scenario_file(full);
        cfg.scenario_path = full;
    } else if (!inline_scenario.empty()) {
        KeyValueFile skv(inline_scenario, "config (scenario.*)");
        cfg.scenario = parse_scenario_kv(skv);
    } else {
        throw ConfigError("config: missing scenario (scenario_file or scenario.* keys)");
    }

    kv.reject_unknown();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    return parse_config_text(read_file(path), dirname(path));
}

std::string serialize_scenario(const ScenarioSpec& spec) {
    std::ostringstream out;
    out << "layers = ";
    for (std::size_t i = 0; i < spec.layer_sizes.size(); ++i)
        out << (i ? "," : "") << spec.layer_sizes[i];
    out << "\n";
    out << "actions = " << spec.actions << "\n";
    out << "mdp_seed = " << spec.mdp_seed << "\n";
    out << "loss_kind = " << spec.loss_kind << "\n";
    out << "loss_seed = " << spec.loss_seed << "\n";
    out << "loss_period = " << spec.loss_period << "\n";
    out << "cons_count = " << spec.cons_count << "\n";
    out << "cons_seed = " << spec.cons_seed << "\n";
    char buf[64];
    const auto real = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "cons_sup = " << real(spec.cons_sup) << "\n";
    out << "cons_noise = " << real(spec.cons_noise) << "\n";
    out << "cons_quantile = " << real(spec.cons_quantile) << "\n";
    if (!spec.thresholds.empty()) {
        out << "thresholds = ";
        for (std::size_t i = 0; i < spec.thresholds.size(); ++i)
            out << (i ? "," : "") << real(spec.thresholds[i]);
        out << "\n";
    }
    out << "slater_slack = " << real(spec.slater_slack) << "\n";
    return out.str();
}

}  // namespace ucpd
