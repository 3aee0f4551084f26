#include "solpath/csvio.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace solpath {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_)
        throw std::runtime_error("cannot open '" + path + "' for writing: " +
                                 std::strerror(errno));
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::comment(const std::string& text) {
    std::fprintf(f_, "# %s\n", text.c_str());
}

void CsvWriter::header(std::span<const std::string> names) {
    width_ = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        std::fprintf(f_, "%s%s", i ? "," : "", names[i].c_str());
    std::fputc('\n', f_);
}

void CsvWriter::row(std::span<const double> values) {
    if (width_ && values.size() != width_)
        throw std::runtime_error("csv row width " + std::to_string(values.size()) +
                                 " does not match header width " + std::to_string(width_) +
                                 " in '" + path_ + "'");
    for (std::size_t i = 0; i < values.size(); ++i)
        std::fprintf(f_, "%s%.17g", i ? "," : "", values[i]);
    std::fputc('\n', f_);
}

void CsvWriter::row(std::span<const std::string> cells) {
    if (width_ && cells.size() != width_)
        throw std::runtime_error("csv row width " + std::to_string(cells.size()) +
                                 " does not match header width " + std::to_string(width_) +
                                 " in '" + path_ + "'");
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::fprintf(f_, "%s%s", i ? "," : "", cells[i].c_str());
    std::fputc('\n', f_);
}

void CsvWriter::close() {
    if (f_) {
        if (std::fclose(f_) != 0)
            throw std::runtime_error("error closing '" + path_ + "'");
        f_ = nullptr;
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv column '" + name + "' not found");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    CsvTable table;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            table.comments.push_back(start == std::string::npos ? "" : line.substr(start));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                std::size_t used = 0;
                row[i] = std::stod(cells[i], &used);
                if (used != cells[i].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": cell '" + cells[i] + "' is not numeric");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error(path + ": no header row");
    return table;
}

}  // namespace solpath
