#pragma once

#include <string>
#include <vector>

namespace spinlab::cli {

// Minimal native quick-look plots; no external plotting dependency.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel);
    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color);
    void add_scatter(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& color);
    void write(const std::string& path) const;

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        bool scatter;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

} // namespace spinlab::cli
