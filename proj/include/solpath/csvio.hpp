#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

// Minimal CSV plumbing: numeric tables with one header row and optional
// leading '#' comment lines.  Doubles are written with %.17g so reruns are
// byte-identical and round-trip exactly.

namespace solpath {

std::string format_double(double v);  // %.17g

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void comment(const std::string& text);               // "# text"
    void header(std::span<const std::string> names);     // once, before rows
    void row(std::span<const double> values);
    void row(std::span<const std::string> cells);
    void close();

  private:
    std::FILE* f_ = nullptr;
    std::string path_;
    std::size_t width_ = 0;
};

struct CsvTable {
    std::vector<std::string> comments;  // '#' lines with the marker stripped
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Column index by header name; throws if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace solpath
