#pragma once

// Declarative sweep specifications, one per reproduced figure or table.
//
// Root keys: figure_id, description, seeds, forecast, plus any run-config key
// as the base configuration. Each [grid] section is a cartesian product over
// its comma-separated values, first key outermost. Inside a grid, `solvers`
// and `coordinates` are single values (a solver set, an observed-coordinate
// set) rather than product axes, and `design = x_submatrix` switches the
// point to the three-column lag submatrix diagnostic.

#include "ngrc/config.hpp"
#include "ngrc/key_value.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ngrc {

enum class DesignKind { Full, XSubmatrix };

struct GridPoint {
  std::size_t index = 0;
  NgrcConfig config;
  DesignKind design = DesignKind::Full;
  bool forecast = true;

  /// True when n_train exceeds the feature count, i.e. the point can be solved.
  [[nodiscard]] bool satisfiable() const;
};

struct SweepSpec {
  std::string figure_id;
  std::string description;
  std::vector<std::uint64_t> seeds;
  NgrcConfig base;
  bool forecast = true;
  double desk_scale = 1.0;  // divisor already applied to seeds; expand() applies it to n_test
  std::vector<KeyValueSection> grids;

  /// Every grid point in declaration order.
  [[nodiscard]] std::vector<GridPoint> expand() const;

  /// Desk-scale shrink: keeps ceil(|seeds| / divisor) seeds; expanded points
  /// get n_test / divisor, never below two Welch segments.
  [[nodiscard]] SweepSpec scaled(double divisor) const;

  /// Throws on an empty grid, duplicate seeds or malformed values. Points
  /// with n_train <= m are allowed; the sweep records them as skipped.
  void validate() const;

  [[nodiscard]] std::string to_text() const;
};

[[nodiscard]] SweepSpec parse_sweep_spec(std::string_view text, std::string_view source = "<string>");
[[nodiscard]] SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Figure identifiers with checked-in specs, in canonical order.
[[nodiscard]] const std::vector<std::string>& figure_ids();
/// <dir>/<figure_id>.spec; throws ArgumentError listing valid ids for unknown ones.
[[nodiscard]] std::filesystem::path spec_path(const std::filesystem::path& dir, const std::string& figure_id);

}  // namespace ngrc
