#include "ngrc/config.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace ngrc {

namespace {

std::string lower(std::string_view text) {
  std::string out = trim(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

std::size_t as_count(long long v, std::string_view key) {
  if (v < 0) throw ArgumentError(std::string(key) + " must be non-negative");
  return static_cast<std::size_t>(v);
}

int as_int(long long v, std::string_view key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ArgumentError(std::string(key) + " is out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string_view to_string(NormalizationSegment s) noexcept {
  return s == NormalizationSegment::Training ? "training" : "full";
}

NormalizationSegment parse_normalization(std::string_view text) {
  const std::string t = lower(text);
  if (t == "training" || t == "train") return NormalizationSegment::Training;
  if (t == "full" || t == "all") return NormalizationSegment::Full;
  throw ArgumentError("unknown normalization segment '" + std::string(text) + "' (expected training | full)");
}

std::vector<int> parse_coordinates(std::string_view text) {
  const std::string t = lower(text);
  if (t == "all" || t == "full") return {0, 1, 2};
  std::vector<int> out;
  for (const std::string& item : split_list(t)) {
    int c = -1;
    if (item == "x" || item == "v1") c = 0;
    else if (item == "y" || item == "v2") c = 1;
    else if (item == "z" || item == "i") c = 2;
    else c = as_int(parse_int(item), "coordinate");
    if (c < 0 || c > 2) throw ArgumentError("coordinate index out of range: " + item);
    if (std::find(out.begin(), out.end(), c) != out.end()) throw ArgumentError("duplicate coordinate: " + item);
    out.push_back(c);
  }
  if (out.empty()) throw ArgumentError("coordinate list is empty");
  return out;
}

std::string coordinate_name(SystemId system, int coordinate) {
  static const char* lorenz_names[] = {"x", "y", "z"};
  static const char* ds_names[] = {"V1", "V2", "I"};
  if (coordinate < 0 || coordinate > 2) return "c" + std::to_string(coordinate);
  return system == SystemId::Lorenz63 ? lorenz_names[coordinate] : ds_names[coordinate];
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "system", "integrator", "h", "integration_step", "n_discard", "k", "tau", "p", "beta",
      "n_train", "n_test", "solvers", "solver", "seed", "coordinates", "normalization",
      "box_half_width", "escape_threshold", "vpt_threshold", "maxima_coordinate"};
  return keys;
}

int NgrcConfig::resolved_maxima_coordinate() const noexcept {
  if (maxima_coordinate >= 0) return maxima_coordinate;
  const auto z = std::find(coordinates.begin(), coordinates.end(), 2);
  if (z != coordinates.end()) return static_cast<int>(z - coordinates.begin());
  return observed_dimension() - 1;
}

std::size_t NgrcConfig::required_steps() const noexcept {
  return embedding().warmup() + n_train + n_test;
}

SimulationRequest NgrcConfig::simulation() const {
  SimulationRequest req;
  req.system = system;
  req.integrator = integrator;
  req.h = h;
  req.integration_step = integration_step;
  req.n_steps = required_steps();
  req.n_discard = n_discard;
  req.seed = seed;
  return req;
}

void NgrcConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h must be positive");
  if (integration_step < 0.0) throw ArgumentError("integration_step must be >= 0");
  (void)simulation().stride();
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  if (p < 0) throw ArgumentError("p must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be finite and >= 0");
  if (coordinates.empty()) throw ArgumentError("at least one coordinate must be observed");
  const std::size_t m = feature_count();
  if (n_train <= m) {
    throw ArgumentError("n_train=" + std::to_string(n_train) + " must exceed the feature count m=" +
                        std::to_string(m));
  }
  if (!(box_half_width > 0.0)) throw ArgumentError("box_half_width must be positive");
  if (!(escape_threshold >= box_half_width)) throw ArgumentError("escape_threshold must be >= box_half_width");
  if (!(vpt_threshold > 0.0)) throw ArgumentError("vpt_threshold must be positive");
  if (maxima_coordinate >= observed_dimension()) throw ArgumentError("maxima_coordinate out of range");
}

void NgrcConfig::apply(const KeyValueSection& s) {
  const auto& keys = config_keys();
  for (const auto& e : s.entries()) {
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
      throw FormatError("line " + std::to_string(e.line) + ": unknown config key '" + e.key + "'");
    }
  }
  if (s.has("system")) system = parse_system(s.get_string("system"));
  if (s.has("integrator")) integrator = parse_integrator(s.get_string("integrator"));
  if (s.has("h")) h = s.get_double("h");
  if (s.has("integration_step")) integration_step = s.get_double("integration_step");
  if (s.has("n_discard")) n_discard = as_count(s.get_int("n_discard"), "n_discard");
  if (s.has("k")) k = as_int(s.get_int("k"), "k");
  if (s.has("tau")) tau = as_int(s.get_int("tau"), "tau");
  if (s.has("p")) p = as_int(s.get_int("p"), "p");
  if (s.has("beta")) beta = s.get_double("beta");
  if (s.has("n_train")) n_train = as_count(s.get_int("n_train"), "n_train");
  if (s.has("n_test")) n_test = as_count(s.get_int("n_test"), "n_test");
  if (s.has("solver")) solvers = parse_solver_list(s.get_string("solver"));
  if (s.has("solvers")) solvers = parse_solver_list(s.get_string("solvers"));
  if (s.has("seed")) seed = static_cast<std::uint64_t>(as_count(s.get_int("seed"), "seed"));
  if (s.has("coordinates")) coordinates = parse_coordinates(s.get_string("coordinates"));
  if (s.has("normalization")) normalization = parse_normalization(s.get_string("normalization"));
  if (s.has("box_half_width")) box_half_width = s.get_double("box_half_width");
  if (s.has("escape_threshold")) escape_threshold = s.get_double("escape_threshold");
  if (s.has("vpt_threshold")) vpt_threshold = s.get_double("vpt_threshold");
  if (s.has("maxima_coordinate")) maxima_coordinate = as_int(s.get_int("maxima_coordinate"), "maxima_coordinate");
}

KeyValueSection NgrcConfig::to_section() const {
  KeyValueSection s;
  s.set("system", std::string(to_string(system)));
  s.set("integrator", std::string(to_string(integrator)));
  s.set("h", format_double(h));
  s.set("integration_step", format_double(simulation().effective_integration_step()));
  s.set("n_discard", std::to_string(n_discard));
  s.set("k", std::to_string(k));
  s.set("tau", std::to_string(tau));
  s.set("p", std::to_string(p));
  s.set("beta", format_double(beta));
  s.set("n_train", std::to_string(n_train));
  s.set("n_test", std::to_string(n_test));
  std::string solver_text;
  for (SolverId id : solvers) {
    if (!solver_text.empty()) solver_text += ',';
    solver_text += to_string(id);
  }
  s.set("solvers", solver_text.empty() ? "none" : solver_text);
  s.set("seed", std::to_string(seed));
  std::string coord_text;
  for (int c : coordinates) {
    if (!coord_text.empty()) coord_text += ',';
    coord_text += std::to_string(c);
  }
  s.set("coordinates", coord_text);
  s.set("normalization", std::string(to_string(normalization)));
  s.set("box_half_width", format_double(box_half_width));
  s.set("escape_threshold", format_double(escape_threshold));
  s.set("vpt_threshold", format_double(vpt_threshold));
  s.set("maxima_coordinate", std::to_string(maxima_coordinate));
  return s;
}

NgrcConfig parse_config(std::string_view text) {
  const KeyValueDocument doc = KeyValueDocument::parse(text);
  if (!doc.sections().empty()) throw FormatError("run configs take no [sections]");
  NgrcConfig cfg;
  cfg.apply(doc.root());
  return cfg;
}

NgrcConfig load_config(const std::filesystem::path& path) {
  const KeyValueDocument doc = KeyValueDocument::load(path);
  if (!doc.sections().empty()) throw FormatError(path.string() + ": run configs take no [sections]");
  NgrcConfig cfg;
  cfg.apply(doc.root());
  return cfg;
}

}  // namespace ngrc
