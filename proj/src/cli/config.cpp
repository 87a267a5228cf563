#include "spinlab/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinlab::cli {

const std::vector<std::string> kJobKinds = {
    "phase-diagram", "dimer-exact", "kerr", "hpa-scan", "meanfield",
    "cmf", "twa", "quench-map", "spectrum"};

namespace {

const std::set<std::string> kModelKeys = {
    "s", "g", "h", "gamma_g", "gamma_l", "gamma_bar", "n_cells", "boundary",
    "delta", "u", "f", "gamma", "d", "cutoff"};

const std::set<std::string> kRunKeys = {
    "n_traj", "dt", "t_max", "save_interval", "scheme", "noise", "correlators",
    "theta", "phi", "k_eigenvalues", "strategy", "near_zero_tol", "dump_pn",
    "n_c", "transformed", "bias", "tolerance", "window", "dt_cluster",
    "max_windows", "model", "keep_spectra", "dump_trajectories", "max_separation"};

const std::set<std::string> kSweepKeys = {"axis", "min", "max", "points", "scale"};
const std::set<std::string> kOutputKeys = {"dir", "svg"};
const std::set<std::string> kTopKeys = {"job", "seed", "workers"};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config: field '" + key + "' is not a number: '" + v + "'");
    }
}

void validate_sweep(const SweepGrid& g) {
    if (g.axis.empty()) throw std::invalid_argument("config: sweep without axis");
    if (g.points < 1) throw std::invalid_argument("config: sweep '" + g.axis + "' needs points >= 1");
    if (g.points == 1 && g.min != g.max)
        throw std::invalid_argument("config: sweep '" + g.axis + "' has points=1 but min != max");
    if (g.log_scale && (g.min <= 0.0 || g.max <= 0.0))
        throw std::invalid_argument("config: log sweep '" + g.axis + "' needs positive bounds");
}

} // namespace

std::vector<double> SweepGrid::values() const {
    std::vector<double> out;
    out.reserve(points);
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < points; ++i) {
        double f = static_cast<double>(i) / (points - 1);
        if (log_scale)
            out.push_back(std::exp(std::log(min) + f * (std::log(max) - std::log(min))));
        else
            out.push_back(min + f * (max - min));
    }
    return out;
}

JobConfig parse_config(const std::string& text) {
    JobConfig cfg;
    cfg.out_dir = "out";
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string section; // "", model, run, sweep, sweep2, output
    SweepGrid sweep1, sweep2;
    bool has_sweep1 = false, has_sweep2 = false;

    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail_line(lineno, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "model" && section != "run" && section != "sweep" &&
                section != "sweep2" && section != "output")
                fail_line(lineno, "unknown section [" + section + "]");
            if (section == "sweep") has_sweep1 = true;
            if (section == "sweep2") has_sweep2 = true;
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail_line(lineno, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail_line(lineno, "empty key");
        if (value.empty()) fail_line(lineno, "empty value for key '" + key + "'");

        if (section.empty()) {
            if (kTopKeys.count(key) == 0) fail_line(lineno, "unknown key '" + key + "'");
            if (key == "job") {
                cfg.job = value;
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else {
                cfg.workers = static_cast<int>(std::stol(value));
                if (cfg.workers < 0) fail_line(lineno, "workers must be >= 0");
            }
        } else if (section == "model") {
            if (kModelKeys.count(key) == 0) fail_line(lineno, "unknown model key '" + key + "'");
            cfg.model[key] = value;
        } else if (section == "run") {
            if (kRunKeys.count(key) == 0) fail_line(lineno, "unknown run key '" + key + "'");
            cfg.run[key] = value;
        } else if (section == "sweep" || section == "sweep2") {
            if (kSweepKeys.count(key) == 0) fail_line(lineno, "unknown sweep key '" + key + "'");
            SweepGrid& g = section == "sweep" ? sweep1 : sweep2;
            if (key == "axis") g.axis = value;
            else if (key == "min") g.min = parse_double(value, key);
            else if (key == "max") g.max = parse_double(value, key);
            else if (key == "points") g.points = static_cast<int>(std::stol(value));
            else {
                if (value != "lin" && value != "log") fail_line(lineno, "scale must be lin or log");
                g.log_scale = value == "log";
            }
        } else { // output
            if (kOutputKeys.count(key) == 0) fail_line(lineno, "unknown output key '" + key + "'");
            if (key == "dir") cfg.out_dir = value;
            else cfg.svg = (value == "true" || value == "1");
        }
    }

    if (cfg.job.empty()) throw std::invalid_argument("config: missing job kind");
    if (std::find(kJobKinds.begin(), kJobKinds.end(), cfg.job) == kJobKinds.end())
        throw std::invalid_argument("config: unknown job kind '" + cfg.job + "'");
    if (has_sweep1) {
        validate_sweep(sweep1);
        cfg.sweeps.push_back(sweep1);
    }
    if (has_sweep2) {
        if (!has_sweep1) throw std::invalid_argument("config: [sweep2] given without [sweep]");
        validate_sweep(sweep2);
        cfg.sweeps.push_back(sweep2);
    }
    return cfg;
}

JobConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const JobConfig& cfg) {
    std::ostringstream out;
    out << "job = " << cfg.job << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "workers = " << cfg.workers << "\n";
    auto dump_section = [&](const char* name, const std::map<std::string, std::string>& kv) {
        if (kv.empty()) return;
        out << "[" << name << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    };
    dump_section("model", cfg.model);
    dump_section("run", cfg.run);
    for (size_t i = 0; i < cfg.sweeps.size(); ++i) {
        out << (i == 0 ? "[sweep]\n" : "[sweep2]\n");
        const auto& g = cfg.sweeps[i];
        out << "axis = " << g.axis << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", g.min);
        out << "min = " << buf << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", g.max);
        out << "max = " << buf << "\n";
        out << "points = " << g.points << "\n";
        out << "scale = " << (g.log_scale ? "log" : "lin") << "\n";
    }
    out << "[output]\n";
    out << "dir = " << cfg.out_dir << "\n";
    out << "svg = " << (cfg.svg ? "true" : "false") << "\n";
    return out.str();
}

double get_double(const std::map<std::string, std::string>& kv, const std::string& key,
                  double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_double(it->second, key);
}

double require_double(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& section) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw std::invalid_argument("config: missing required [" + section + "] key '" + key + "'");
    return parse_double(it->second, key);
}

std::string get_string(const std::map<std::string, std::string>& kv, const std::string& key,
                       const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

bool get_bool(const std::map<std::string, std::string>& kv, const std::string& key, bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return it->second == "true" || it->second == "1";
}

long get_long(const std::map<std::string, std::string>& kv, const std::string& key, long fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stol(it->second);
}

} // namespace spinlab::cli
