#pragma once

// Minimal declarative text format used by run configs and sweep specs.
//
//   # comment
//   figure_id = F5_degree_growth
//   seeds = 0..24
//   [grid]
//   p = 1..8
//   beta = 0, 1e-10
//
// Keys before the first [section] belong to an unnamed root section. The
// same section name may appear several times; each occurrence is kept.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ngrc {

struct KeyValueEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

class KeyValueSection {
 public:
  KeyValueSection() = default;
  explicit KeyValueSection(std::string name, std::size_t line = 0) : name_(std::move(name)), line_(line) {}

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] const std::vector<KeyValueEntry>& entries() const noexcept { return entries_; }

  /// Later assignments to the same key replace earlier ones.
  void set(std::string key, std::string value, std::size_t line = 0);
  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] const KeyValueEntry* find(std::string_view key) const;

  [[nodiscard]] std::string get_string(std::string_view key) const;
  [[nodiscard]] std::string get_string(std::string_view key, std::string_view fallback) const;
  [[nodiscard]] long long get_int(std::string_view key) const;
  [[nodiscard]] long long get_int(std::string_view key, long long fallback) const;
  [[nodiscard]] double get_double(std::string_view key) const;
  [[nodiscard]] double get_double(std::string_view key, double fallback) const;
  [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
  [[nodiscard]] std::vector<long long> get_int_list(std::string_view key) const;
  [[nodiscard]] std::vector<double> get_double_list(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> get_string_list(std::string_view key) const;

 private:
  [[nodiscard]] const KeyValueEntry& require(std::string_view key) const;

  std::string name_;
  std::size_t line_ = 0;
  std::vector<KeyValueEntry> entries_;
};

class KeyValueDocument {
 public:
  [[nodiscard]] static KeyValueDocument parse(std::string_view text, std::string_view source = "<string>");
  [[nodiscard]] static KeyValueDocument load(const std::filesystem::path& path);

  [[nodiscard]] const KeyValueSection& root() const noexcept { return root_; }
  [[nodiscard]] KeyValueSection& root() noexcept { return root_; }
  [[nodiscard]] const std::vector<KeyValueSection>& sections() const noexcept { return sections_; }
  [[nodiscard]] std::vector<const KeyValueSection*> sections_named(std::string_view name) const;
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  [[nodiscard]] std::string to_string() const;

 private:
  std::string source_;
  KeyValueSection root_;
  std::vector<KeyValueSection> sections_;
};

// Scalar and list parsing shared by the config readers and the CLI.
[[nodiscard]] long long parse_int(std::string_view text);
[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] bool parse_bool(std::string_view text);
[[nodiscard]] std::vector<std::string> split_list(std::string_view text);
/// Items may be integers or inclusive ranges "a..b".
[[nodiscard]] std::vector<long long> parse_int_list(std::string_view text);
[[nodiscard]] std::vector<double> parse_double_list(std::string_view text);
[[nodiscard]] std::string trim(std::string_view text);

}  // namespace ngrc
