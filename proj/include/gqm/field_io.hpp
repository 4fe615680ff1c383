#pragma once

// Tabulated gauge fields and their text file format.
//
//   gqm-field-1d v1
//   dim <N>
//   t <t_min> <t_max> <n_t>
//   x <x_min> <x_max> <n_x>
//   phi <it> <ix> <re_00> <im_00> <re_01> <im_01> ...   (2 N^2 numbers, row-major)
//   a   <it> <ix> ...
//
// Samples sit on the closed grids t_i = t_min + i (t_max - t_min) / (n_t - 1)
// (same for x); n_t = 1 means time independent (t_min = t_max). Every (it, ix)
// pair appears once for phi and once for a, in any order. Lines starting with
// '#' are comments. Numbers are written in shortest round-trip form, so
// write -> read -> write is byte-identical.

#include "gqm/gauge.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gqm {

struct TabulatedField {
  int dim = 1;
  double t_min = 0.0, t_max = 0.0;
  int n_t = 1;
  double x_min = 0.0, x_max = 1.0;
  int n_x = 2;
  // index it * n_x + ix
  std::vector<Matrix> phi;
  std::vector<Matrix> a;

  /// Samples an analytic field onto the table grids.
  static TabulatedField sample(const GaugeField1D& field, double t_min, double t_max, int n_t,
                               double x_min, double x_max, int n_x);

  /// Bilinear interpolation, clamped outside the table.
  GaugeField1D to_field() const;

  void validate() const;
};

void write_tabulated_field(std::ostream& os, const TabulatedField& table);
TabulatedField read_tabulated_field(std::istream& is);

void save_tabulated_field(const std::filesystem::path& path, const TabulatedField& table);
TabulatedField load_tabulated_field(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace gqm
