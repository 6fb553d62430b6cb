#pragma once

// Hyperparameter bundle for one NGRC run and its text form.

#include "ngrc/dynamics.hpp"
#include "ngrc/features.hpp"
#include "ngrc/key_value.hpp"
#include "ngrc/solvers.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ngrc {

/// Which rows define the max-abs normalization divisor.
enum class NormalizationSegment {
  Training,  // warm-up + training rows only
  Full,      // every generated row, training and test
};

[[nodiscard]] std::string_view to_string(NormalizationSegment s) noexcept;
[[nodiscard]] NormalizationSegment parse_normalization(std::string_view text);

struct NgrcConfig {
  SystemId system = SystemId::Lorenz63;
  IntegratorId integrator = IntegratorId::ExplicitEuler;
  double h = 0.01;
  double integration_step = 0.0;  // 0: scheme default
  std::size_t n_discard = 10000;
  int k = 1;
  int tau = 1;
  int p = 2;
  double beta = 0.0;
  std::size_t n_train = 500;
  std::size_t n_test = 10000;
  std::vector<SolverId> solvers = {SolverId::Svd};
  std::uint64_t seed = 0;
  std::vector<int> coordinates = {0, 1, 2};
  NormalizationSegment normalization = NormalizationSegment::Full;
  double box_half_width = 1.0;
  double escape_threshold = 10.0;
  double vpt_threshold = 0.9;
  int maxima_coordinate = -1;  // index into coordinates; -1 picks z, or the last observed one

  [[nodiscard]] int observed_dimension() const noexcept { return static_cast<int>(coordinates.size()); }
  [[nodiscard]] EmbeddingConfig embedding() const noexcept { return {k, tau, observed_dimension()}; }
  [[nodiscard]] std::size_t feature_count() const { return monomial_count(k * observed_dimension(), p); }
  [[nodiscard]] MonomialBasis basis() const { return monomial_exponents(k, observed_dimension(), p); }
  [[nodiscard]] int resolved_maxima_coordinate() const noexcept;

  /// Output steps to simulate: warm-up + n_train + n_test.
  [[nodiscard]] std::size_t required_steps() const noexcept;
  [[nodiscard]] SimulationRequest simulation() const;

  /// Throws ArgumentError when an invariant fails (n_train > m, tau >= 1, ...).
  void validate() const;

  /// Overrides fields named in section; unknown keys are an error.
  void apply(const KeyValueSection& section);
  [[nodiscard]] KeyValueSection to_section() const;
};

[[nodiscard]] NgrcConfig load_config(const std::filesystem::path& path);
[[nodiscard]] NgrcConfig parse_config(std::string_view text);

/// Accepts "all", "x", "x,z", "0,2", and Double-Scroll names V1, V2, I.
[[nodiscard]] std::vector<int> parse_coordinates(std::string_view text);
[[nodiscard]] std::string coordinate_name(SystemId system, int coordinate);

/// Keys recognised by NgrcConfig::apply.
[[nodiscard]] const std::vector<std::string>& config_keys();

}  // namespace ngrc
