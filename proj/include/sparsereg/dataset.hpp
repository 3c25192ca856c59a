#pragma once

#include <string>
#include <vector>

#include "sparsereg/csv.hpp"
#include "sparsereg/math.hpp"

namespace sparsereg {

// Supervised pairs {(x_n, y_n)}: inputs in R^d, targets in R^D.
struct Dataset {
  std::vector<Vec> inputs;
  std::vector<Vec> targets;

  int size() const { return static_cast<int>(inputs.size()); }
  int input_dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
  int output_dim() const { return targets.empty() ? 0 : static_cast<int>(targets.front().size()); }

  static Dataset from_1d(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw dimension_error("dataset: x and y lengths differ");
    Dataset d;
    d.inputs.reserve(x.size());
    d.targets.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      d.inputs.push_back({x[i]});
      d.targets.push_back({y[i]});
    }
    return d;
  }

  Vec xs_1d() const {
    Vec x(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) x[i] = inputs[i].at(0);
    return x;
  }
  Vec ys_1d() const {
    Vec y(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) y[i] = targets[i].at(0);
    return y;
  }
};

inline void validate(const Dataset& d) {
  if (d.inputs.size() != d.targets.size())
    throw dimension_error("dataset: inputs and targets have different counts");
  for (int n = 0; n < d.size(); ++n) {
    if (static_cast<int>(d.inputs[n].size()) != d.input_dim() ||
        static_cast<int>(d.targets[n].size()) != d.output_dim())
      throw dimension_error("dataset: ragged row " + std::to_string(n));
    if (!all_finite(d.inputs[n]) || !all_finite(d.targets[n]))
      throw dimension_error("dataset: non-finite entry in row " + std::to_string(n));
  }
}

// Data CSV convention: header row with columns x1..xd then y1..yD (a 1D set
// may simply use `x,y`). Comma separated, decimal point, `#` comments.
inline Dataset dataset_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  std::vector<int> xcols, ycols;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    const std::string& c = t.columns[i];
    if (!c.empty() && c[0] == 'x')
      xcols.push_back(static_cast<int>(i));
    else if (!c.empty() && c[0] == 'y')
      ycols.push_back(static_cast<int>(i));
    else
      throw parse_error("data csv: column '" + c + "' is neither an x nor a y column");
  }
  if (xcols.empty() || ycols.empty())
    throw parse_error("data csv: need at least one x column and one y column");
  Dataset d;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Vec x, y;
    for (int c : xcols) x.push_back(csv_number(t.rows[r][c], r, t.columns[c]));
    for (int c : ycols) y.push_back(csv_number(t.rows[r][c], r, t.columns[c]));
    d.inputs.push_back(std::move(x));
    d.targets.push_back(std::move(y));
  }
  validate(d);
  return d;
}

inline std::string dataset_to_csv(const Dataset& d) {
  validate(d);
  std::string out = "# schema=data/1\n";
  if (d.input_dim() == 1 && d.output_dim() == 1) {
    out += "x,y\n";
  } else {
    for (int j = 0; j < d.input_dim(); ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
    for (int j = 0; j < d.output_dim(); ++j) out += ",y" + std::to_string(j + 1);
    out += '\n';
  }
  for (int n = 0; n < d.size(); ++n) {
    for (int j = 0; j < d.input_dim(); ++j) {
      if (j) out += ',';
      out += fmt_g17(d.inputs[n][j]);
    }
    for (int j = 0; j < d.output_dim(); ++j) {
      out += ',';
      out += fmt_g17(d.targets[n][j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sparsereg
