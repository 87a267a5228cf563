#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace spinlab::cli {

// RFC-4180-style CSV: header row, quoted fields only when needed, floats
// printed with 17 significant digits so reruns are byte-identical.
std::string csv_num(double v);
std::string csv_quote(const std::string& field);

class CsvFile {
  public:
    CsvFile(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    size_t n_cols_;
};

} // namespace spinlab::cli
