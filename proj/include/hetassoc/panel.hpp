#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetassoc {

//! Odd/even split of one series. With 1-based time t = 1..T the fit set
//! holds t = 1, 3, 5, ... and the eval set holds t = 2, 4, 6, ...
struct SplitPair
{
  std::vector<double> fit;
  std::vector<double> eval;
};

[[nodiscard]] SplitPair split_odd_even(std::span<const double> series);

//! Inverse of split_odd_even.
[[nodiscard]] std::vector<double> interleave(const SplitPair& split);

//! T x N panel: rows are time points, columns are individuals. Immutable
//! once constructed; the constructor enforces every invariant.
class PanelSeries
{
public:
  static constexpr std::size_t min_time_points = 8;

  PanelSeries(std::vector<std::string> labels,
              std::vector<std::vector<double>> columns,
              std::size_t dependence_order);

  std::size_t time_points() const { return time_points_; }
  std::size_t individuals() const { return labels_.size(); }
  std::size_t dependence_order() const { return dependence_order_; }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t j) const { return labels_.at(j); }
  std::span<const double> column(std::size_t j) const { return columns_.at(j); }
  double at(std::size_t t, std::size_t j) const { return columns_.at(j).at(t); }

  //! Column index of a label; throws validation error when absent.
  std::size_t index_of(std::string_view label) const;
  bool contains(std::string_view label) const;

  SplitPair split(std::size_t j) const { return split_odd_even(column(j)); }

private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> columns_;
  std::size_t time_points_ = 0;
  std::size_t dependence_order_ = 0;
};

/**
 * Reads a delimiter-separated panel. The first row holds the labels, each
 * following row one time point. Cells are decimal reals (scientific
 * notation allowed); blank trailing lines are ignored.
 *
 * Throws ParseError for non-numeric or non-finite cells and ragged rows, and
 * Error with codes validation / size / dependence_order for the panel
 * invariants.
 */
[[nodiscard]] PanelSeries load_panel(std::istream& source,
                                     std::size_t dependence_order,
                                     char delimiter = ',');

[[nodiscard]] PanelSeries load_panel_file(const std::string& path,
                                          std::size_t dependence_order,
                                          char delimiter = ',');

//! Writes the panel in the format load_panel reads. Values use the
//! shortest representation that parses back to the identical double.
void write_panel(std::ostream& out, const PanelSeries& panel, char delimiter = ',');

} // namespace hetassoc
