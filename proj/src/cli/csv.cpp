#include "spinlab/cli/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace spinlab::cli {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path), n_cols_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_quote(header[i]);
    }
    out_ << '\n';
}

void CsvFile::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_cols_)
        throw std::invalid_argument("csv row width mismatch in " + path_);
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_quote(fields[i]);
    }
    out_ << '\n';
}

} // namespace spinlab::cli
