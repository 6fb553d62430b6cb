#include "ngrc/sweep_spec.hpp"

#include "ngrc/errors.hpp"
#include "ngrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ngrc {

namespace {

// Keys that are a single value inside a grid, not a product axis.
bool is_scalar_grid_key(const std::string& key) {
  return key == "solvers" || key == "solver" || key == "coordinates";
}

bool is_grid_only_key(const std::string& key) { return key == "design" || key == "forecast"; }

DesignKind parse_design(std::string_view text) {
  const std::string t = trim(text);
  if (t == "full") return DesignKind::Full;
  if (t == "x_submatrix") return DesignKind::XSubmatrix;
  throw FormatError("unknown design '" + t + "' (expected full | x_submatrix)");
}

struct Axis {
  std::string key;
  std::vector<std::string> values;
};

}  // namespace

bool GridPoint::satisfiable() const {
  if (design == DesignKind::XSubmatrix) return config.n_train > 3;
  return config.n_train > config.feature_count();
}

std::vector<GridPoint> SweepSpec::expand() const {
  std::vector<GridPoint> out;
  for (const KeyValueSection& grid : grids) {
    std::vector<Axis> axes;
    KeyValueSection fixed;
    GridPoint proto;
    proto.config = base;
    proto.forecast = forecast;
    for (const auto& e : grid.entries()) {
      if (e.key == "design") {
        proto.design = parse_design(e.value);
      } else if (e.key == "forecast") {
        proto.forecast = parse_bool(e.value);
      } else if (is_scalar_grid_key(e.key)) {
        fixed.set(e.key, e.value, e.line);
      } else {
        axes.push_back({e.key, split_list(e.value)});
        // Integer ranges expand here so "1..8" is eight axis values.
        if (e.value.find("..") != std::string::npos) {
          axes.back().values.clear();
          for (long long v : parse_int_list(e.value)) axes.back().values.push_back(std::to_string(v));
        }
        if (axes.back().values.empty()) throw FormatError("grid key '" + e.key + "' has no values");
      }
    }
    proto.config.apply(fixed);

    std::vector<std::size_t> counter(axes.size(), 0);
    bool done = false;
    while (!done) {
      GridPoint gp = proto;
      KeyValueSection point;
      for (std::size_t a = 0; a < axes.size(); ++a) point.set(axes[a].key, axes[a].values[counter[a]]);
      gp.config.apply(point);
      if (desk_scale > 1.0) {
        const std::size_t floor_len = 2 * welch_segment_length(gp.config.h);
        const auto reduced = static_cast<std::size_t>(static_cast<double>(gp.config.n_test) / desk_scale);
        gp.config.n_test = std::min(gp.config.n_test, std::max(reduced, floor_len));
      }
      gp.index = out.size();
      out.push_back(std::move(gp));

      // Odometer increment, last axis fastest.
      done = true;
      for (std::size_t a = axes.size(); a-- > 0;) {
        if (++counter[a] < axes[a].values.size()) {
          done = false;
          break;
        }
        counter[a] = 0;
      }
    }
  }
  return out;
}

SweepSpec SweepSpec::scaled(double divisor) const {
  if (!(divisor >= 1.0) || !std::isfinite(divisor)) throw ArgumentError("desk-scale divisor must be >= 1");
  SweepSpec out = *this;
  const auto keep = static_cast<std::size_t>(std::ceil(static_cast<double>(seeds.size()) / divisor));
  out.seeds.resize(std::max<std::size_t>(1, keep));
  out.desk_scale = desk_scale * divisor;
  return out;
}

void SweepSpec::validate() const {
  if (figure_id.empty()) throw FormatError("sweep spec needs a figure_id");
  if (seeds.empty()) throw FormatError("sweep spec needs at least one seed");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw FormatError("sweep spec seeds must be distinct");
  if (grids.empty()) throw FormatError("sweep spec needs at least one [grid] section");
  const std::vector<GridPoint> points = expand();
  if (points.empty()) throw FormatError("sweep grid is empty");
  for (const GridPoint& gp : points) {
    NgrcConfig cfg = gp.config;
    // n_train <= m is recorded as a skipped row, not a spec error.
    cfg.n_train = std::max(cfg.n_train, cfg.feature_count() + 1);
    cfg.validate();
    if (gp.design == DesignKind::XSubmatrix && (cfg.k != 2 || cfg.coordinates.size() != 1)) {
      throw FormatError("x_submatrix grid points need k = 2 and a single observed coordinate");
    }
  }
}

std::string SweepSpec::to_text() const {
  std::ostringstream os;
  os << "figure_id = " << figure_id << '\n';
  if (!description.empty()) os << "description = " << description << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? ", " : "") << seeds[i];
  os << '\n';
  if (desk_scale != 1.0) os << "desk_scale = " << desk_scale << '\n';
  os << "forecast = " << (forecast ? "true" : "false") << '\n';
  const KeyValueSection base_section = base.to_section();
  for (const auto& e : base_section.entries()) {
    if (e.key != "seed") os << e.key << " = " << e.value << '\n';
  }
  for (const auto& g : grids) {
    os << "\n[grid]\n";
    for (const auto& e : g.entries()) os << e.key << " = " << e.value << '\n';
  }
  return os.str();
}

SweepSpec parse_sweep_spec(std::string_view text, std::string_view source) {
  const KeyValueDocument doc = KeyValueDocument::parse(text, source);
  SweepSpec spec;
  KeyValueSection base_keys;
  for (const auto& e : doc.root().entries()) {
    if (e.key == "figure_id") spec.figure_id = e.value;
    else if (e.key == "description") spec.description = e.value;
    else if (e.key == "forecast") spec.forecast = parse_bool(e.value);
    else if (e.key == "desk_scale") spec.desk_scale = parse_double(e.value);
    else if (e.key == "seeds") {
      for (long long s : parse_int_list(e.value)) {
        if (s < 0) throw FormatError("seeds must be non-negative");
        spec.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    } else {
      base_keys.set(e.key, e.value, e.line);
    }
  }
  spec.base.apply(base_keys);
  for (const auto& s : doc.sections()) {
    if (s.name() != "grid") throw FormatError(std::string(source) + ": unknown section [" + s.name() + "]");
    const auto& keys = config_keys();
    for (const auto& e : s.entries()) {
      if (!is_grid_only_key(e.key) && std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
        throw FormatError(std::string(source) + ":" + std::to_string(e.line) + ": unknown grid key '" + e.key + "'");
      }
    }
    spec.grids.push_back(s);
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_spec(buffer.str(), path.string());
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {
      "F1_attractor",      "F2_stats",          "F3_beta_tradeoff",  "F4_beta_testing",
      "F5_degree_growth",  "F6_delay_interplay", "F7_ntrain",        "F8_sparse",
      "F9_partial",        "S1_doublescroll",   "S2_doublescroll",   "S3_doublescroll",
      "S4_doublescroll"};
  return ids;
}

std::filesystem::path spec_path(const std::filesystem::path& dir, const std::string& figure_id) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), figure_id) == ids.end()) {
    std::string list;
    for (const auto& id : ids) list += (list.empty() ? "" : ", ") + id;
    throw ArgumentError("unknown figure id '" + figure_id + "'; valid ids: " + list);
  }
  return dir / (figure_id + ".spec");
}

}  // namespace ngrc
