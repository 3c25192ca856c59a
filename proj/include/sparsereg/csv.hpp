#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sparsereg/errors.hpp"
#include "sparsereg/serialize.hpp"  // fmt_g17

namespace sparsereg {

// Report CSV writer: leading `# schema=<name>/1` comment, then a header row,
// then data rows. Doubles are written with %.17g so reports are reproducible
// byte for byte.
class CsvWriter {
 public:
  CsvWriter(std::string schema, std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    out_ += "# schema=" + schema + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out_ += ',';
      out_ += columns_[i];
    }
    out_ += '\n';
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& cell(double x) { return raw(fmt_g17(x)); }
    Row& cell(int x) { return raw(std::to_string(x)); }
    Row& cell(long x) { return raw(std::to_string(x)); }
    Row& cell(std::size_t x) { return raw(std::to_string(x)); }
    Row& cell(const std::string& s) { return raw(s); }
    Row& cell(bool b) { return raw(b ? "1" : "0"); }
    ~Row() { w_.out_ += '\n'; }
    Row(const Row&) = delete;

   private:
    Row& raw(const std::string& s) {
      if (n_++) w_.out_ += ',';
      w_.out_ += s;
      return *this;
    }
    CsvWriter& w_;
    int n_ = 0;
  };

  Row row() { return Row(*this); }

  const std::string& str() const { return out_; }

 private:
  std::vector<std::string> columns_;
  std::string out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw parse_error("csv: no column named '" + name + "'");
  }
};

// Parses comma-separated text with a header row; `#` lines are comments.
inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.columns.size())
        throw parse_error("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.columns.size()),
                          "line " + std::to_string(lineno));
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw parse_error("csv: missing header row");
  return t;
}

inline double csv_number(const std::string& cell, std::size_t row, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw parse_error("csv: cell '" + cell + "' is not a number",
                      "row " + std::to_string(row) + ", column " + col);
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sparsereg
