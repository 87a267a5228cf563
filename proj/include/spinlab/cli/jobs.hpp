#pragma once

#include <string>
#include <vector>

#include "spinlab/cli/config.hpp"

namespace spinlab::cli {

struct JobOutcome {
    int exit_code = 0; // 0 ok, 2 runtime, 3 partial failure over budget
    std::vector<std::string> files;
    std::string manifest_path;
    int n_points = 0;
    int n_errors = 0;
};

JobOutcome run_job(const JobConfig& config);

} // namespace spinlab::cli
