#include "hetassoc/panel.hpp"

#include "hetassoc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace hetassoc {

SplitPair split_odd_even(std::span<const double> series)
{
  SplitPair out;
  out.fit.reserve((series.size() + 1) / 2);
  out.eval.reserve(series.size() / 2);
  for (std::size_t k = 0; k < series.size(); ++k) {
    // k is 0-based, so k even <=> t = k + 1 odd
    if (k % 2 == 0)
      out.fit.push_back(series[k]);
    else
      out.eval.push_back(series[k]);
  }
  return out;
}

std::vector<double> interleave(const SplitPair& split)
{
  if (split.fit.size() != split.eval.size() && split.fit.size() != split.eval.size() + 1)
    throw Error(ErrorCode::alignment, "interleave: fit/eval lengths are not an odd/even split");
  std::vector<double> out;
  out.reserve(split.fit.size() + split.eval.size());
  for (std::size_t k = 0; k < split.fit.size(); ++k) {
    out.push_back(split.fit[k]);
    if (k < split.eval.size())
      out.push_back(split.eval[k]);
  }
  return out;
}

PanelSeries::PanelSeries(std::vector<std::string> labels,
                         std::vector<std::vector<double>> columns,
                         std::size_t dependence_order)
  : labels_(std::move(labels))
  , columns_(std::move(columns))
  , dependence_order_(dependence_order)
{
  if (labels_.empty())
    throw Error(ErrorCode::validation, "panel has no columns");
  if (labels_.size() != columns_.size())
    throw Error(ErrorCode::validation, "label count does not match column count");

  std::set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (label.empty())
      throw Error(ErrorCode::validation, "empty column label");
    if (!seen.insert(label).second)
      throw Error(ErrorCode::validation, "duplicate label '" + label + "'");
  }

  time_points_ = columns_.front().size();
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != time_points_)
      throw Error(ErrorCode::validation, "column '" + labels_[j] + "' has a different length");
    for (std::size_t t = 0; t < time_points_; ++t) {
      if (!std::isfinite(columns_[j][t])) {
        throw Error(ErrorCode::validation,
                    "non-finite value in column '" + labels_[j] + "' at time " +
                      std::to_string(t + 1));
      }
    }
  }

  if (time_points_ < min_time_points) {
    throw Error(ErrorCode::size,
                "panel has T=" + std::to_string(time_points_) + " time points, need at least " +
                  std::to_string(min_time_points));
  }
  if (dependence_order_ >= time_points_ / 2) {
    throw Error(ErrorCode::dependence_order,
                "dependence order m=" + std::to_string(dependence_order_) +
                  " must be below floor(T/2)=" + std::to_string(time_points_ / 2));
  }
}

std::size_t PanelSeries::index_of(std::string_view label) const
{
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw Error(ErrorCode::validation, "unknown label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool PanelSeries::contains(std::string_view label) const
{
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

namespace {

std::string_view trim(std::string_view s)
{
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_space(s.back()))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line, char delimiter)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col)
{
  std::string_view text = cell;
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  const auto where = "row " + std::to_string(row) + ", column " + std::to_string(col);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw ParseError(row, col, "non-numeric cell '" + std::string(cell) + "' at " + where);
  if (!std::isfinite(value))
    throw ParseError(row, col, "non-finite cell '" + std::string(cell) + "' at " + where);
  return value;
}

} // namespace

PanelSeries load_panel(std::istream& source, std::size_t dependence_order, char delimiter)
{
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> labels;
  while (std::getline(source, line)) {
    ++row;
    if (!trim(line).empty())
      break;
  }
  if (trim(line).empty())
    throw ParseError(row, 0, "input has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  for (auto cell : split_cells(line, delimiter))
    labels.emplace_back(cell);

  std::vector<std::vector<double>> columns(labels.size());
  std::size_t pending_blank = 0;
  while (std::getline(source, line)) {
    ++row;
    if (trim(line).empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0)
      throw ParseError(row - 1, 0, "blank line inside data at row " + std::to_string(row - 1));
    const auto cells = split_cells(line, delimiter);
    if (cells.size() != labels.size()) {
      throw ParseError(row, cells.size(),
                       "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(labels.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c)
      columns[c].push_back(parse_cell(cells[c], row, c + 1));
  }
  return PanelSeries(std::move(labels), std::move(columns), dependence_order);
}

PanelSeries load_panel_file(const std::string& path, std::size_t dependence_order, char delimiter)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::validation, "cannot open input file '" + path + "'");
  return load_panel(in, dependence_order, delimiter);
}

void write_panel(std::ostream& out, const PanelSeries& panel, char delimiter)
{
  const auto& labels = panel.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j > 0)
      out << delimiter;
    out << labels[j];
  }
  out << '\n';
  char buffer[64];
  for (std::size_t t = 0; t < panel.time_points(); ++t) {
    for (std::size_t j = 0; j < panel.individuals(); ++j) {
      if (j > 0)
        out << delimiter;
      const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), panel.at(t, j));
      out.write(buffer, ptr - buffer);
    }
    out << '\n';
  }
}

} // namespace hetassoc
