#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmelab/io.hpp"

namespace pme {

enum class FieldKind { density, potential };

inline std::string to_string(FieldKind k) {
  return k == FieldKind::density ? "density" : "potential";
}

/// Sampled radial (or, for N=1, axis) scalar function. The grid is strictly
/// increasing; density samples are nonnegative. A grid starting at a
/// negative coordinate is an N=1 axis field; a nonnegative grid is radial
/// (for N=1 it stands for the even half of the line).
struct RadialField {
  std::vector<double> grid;
  std::vector<double> values;
  FieldKind kind = FieldKind::density;

  RadialField() = default;
  RadialField(std::vector<double> g, std::vector<double> v, FieldKind k)
      : grid(std::move(g)), values(std::move(v)), kind(k) {
    validate();
  }

  void validate() const {
    if (grid.size() != values.size() || grid.size() < 2)
      throw std::invalid_argument("RadialField: grid/values size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw std::invalid_argument("RadialField: grid must be strictly increasing");
    if (kind == FieldKind::density)
      for (double v : values)
        if (v < 0.0)
          throw std::invalid_argument("RadialField: density values must be >= 0");
  }

  bool is_axis() const { return grid.front() < 0.0; }

  std::string to_csv() const {
    CsvTable t;
    t.header = {"r", "value"};
    for (std::size_t i = 0; i < grid.size(); ++i)
      t.rows.push_back({format_double(grid[i]), format_double(values[i])});
    return t.str();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["grid"] = grid;
    j["values"] = values;
    j["kind"] = to_string(kind);
    return j;
  }

  static RadialField from_json(const nlohmann::ordered_json& j) {
    FieldKind k = j.at("kind").get<std::string>() == "density" ? FieldKind::density
                                                               : FieldKind::potential;
    return RadialField(j.at("grid").get<std::vector<double>>(),
                       j.at("values").get<std::vector<double>>(), k);
  }
};

}  // namespace pme
