#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spinlab::cli {

// Sectioned key=value job description. Numeric rate fields are in units of
// the intra-cell coupling g unless the key says otherwise.
struct SweepGrid {
    std::string axis;
    double min = 0.0;
    double max = 0.0;
    int points = 1;
    bool log_scale = false;

    std::vector<double> values() const;
    bool operator==(const SweepGrid&) const = default;
};

struct JobConfig {
    std::string job;
    std::map<std::string, std::string> model;
    std::map<std::string, std::string> run;
    std::vector<SweepGrid> sweeps;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int workers = 0; // 0 -> hardware concurrency
    bool svg = false;

    bool operator==(const JobConfig&) const = default;
};

extern const std::vector<std::string> kJobKinds;

// Strict parser: unknown sections, unknown keys, malformed numbers and
// inconsistent grids are all hard errors carrying the line number or key.
JobConfig parse_config(const std::string& text);
JobConfig load_config_file(const std::string& path);
std::string serialize_config(const JobConfig& config);

// helpers for job implementations
double get_double(const std::map<std::string, std::string>& kv, const std::string& key,
                  double fallback);
double require_double(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& section);
std::string get_string(const std::map<std::string, std::string>& kv, const std::string& key,
                       const std::string& fallback);
bool get_bool(const std::map<std::string, std::string>& kv, const std::string& key, bool fallback);
long get_long(const std::map<std::string, std::string>& kv, const std::string& key, long fallback);

} // namespace spinlab::cli
