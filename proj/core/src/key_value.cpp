#include "ngrc/key_value.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ngrc {

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

long long parse_int(std::string_view text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc{} || ptr != end || t.empty()) throw FormatError("expected an integer, got '" + t + "'");
  return value;
}

double parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw FormatError("expected a number, got an empty value");
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw FormatError("expected a number, got '" + t + "'");
  }
  if (used != t.size()) throw FormatError("expected a number, got '" + t + "'");
  return value;
}

bool parse_bool(std::string_view text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw FormatError("expected a boolean, got '" + t + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<long long> parse_int_list(std::string_view text) {
  std::vector<long long> out;
  for (const std::string& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    const long long lo = parse_int(item.substr(0, dots));
    const long long hi = parse_int(item.substr(dots + 2));
    if (hi < lo) throw FormatError("empty range '" + item + "'");
    for (long long v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    if (item.find("..") != std::string::npos) {
      for (long long v : parse_int_list(item)) out.push_back(static_cast<double>(v));
    } else {
      out.push_back(parse_double(item));
    }
  }
  return out;
}

void KeyValueSection::set(std::string key, std::string value, std::size_t line) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      e.line = line;
      return;
    }
  }
  entries_.push_back({std::move(key), std::move(value), line});
}

const KeyValueEntry* KeyValueSection::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool KeyValueSection::has(std::string_view key) const { return find(key) != nullptr; }

const KeyValueEntry& KeyValueSection::require(std::string_view key) const {
  const KeyValueEntry* e = find(key);
  if (e == nullptr) {
    throw FormatError("missing key '" + std::string(key) + "'" +
                      (name_.empty() ? std::string() : " in section [" + name_ + "]"));
  }
  return *e;
}

namespace {

template <class F>
auto with_context(const KeyValueEntry& e, F&& f) -> decltype(f(e.value)) {
  try {
    return f(e.value);
  } catch (const FormatError& err) {
    throw FormatError("line " + std::to_string(e.line) + ", key '" + e.key + "': " + err.what());
  }
}

}  // namespace

std::string KeyValueSection::get_string(std::string_view key) const { return require(key).value; }

std::string KeyValueSection::get_string(std::string_view key, std::string_view fallback) const {
  const KeyValueEntry* e = find(key);
  return e ? e->value : std::string(fallback);
}

long long KeyValueSection::get_int(std::string_view key) const {
  return with_context(require(key), [](const std::string& v) { return parse_int(v); });
}

long long KeyValueSection::get_int(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KeyValueSection::get_double(std::string_view key) const {
  return with_context(require(key), [](const std::string& v) { return parse_double(v); });
}

double KeyValueSection::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool KeyValueSection::get_bool(std::string_view key, bool fallback) const {
  const KeyValueEntry* e = find(key);
  if (e == nullptr) return fallback;
  return with_context(*e, [](const std::string& v) { return parse_bool(v); });
}

std::vector<long long> KeyValueSection::get_int_list(std::string_view key) const {
  return with_context(require(key), [](const std::string& v) { return parse_int_list(v); });
}

std::vector<double> KeyValueSection::get_double_list(std::string_view key) const {
  return with_context(require(key), [](const std::string& v) { return parse_double_list(v); });
}

std::vector<std::string> KeyValueSection::get_string_list(std::string_view key) const {
  return split_list(require(key).value);
}

KeyValueDocument KeyValueDocument::parse(std::string_view text, std::string_view source) {
  KeyValueDocument doc;
  doc.source_ = std::string(source);
  KeyValueSection* current = &doc.root_;

  std::stringstream ss{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto where = [&] { return doc.source_ + ":" + std::to_string(line_no) + ": "; };

    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(where() + "unterminated section header");
      std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty()) throw FormatError(where() + "empty section name");
      doc.sections_.emplace_back(std::move(name), line_no);
      current = &doc.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(where() + "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw FormatError(where() + "empty key");
    current->set(std::move(key), trim(std::string_view(line).substr(eq + 1)), line_no);
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::vector<const KeyValueSection*> KeyValueDocument::sections_named(std::string_view name) const {
  std::vector<const KeyValueSection*> out;
  for (const auto& s : sections_) {
    if (s.name() == name) out.push_back(&s);
  }
  return out;
}

std::string KeyValueDocument::to_string() const {
  std::ostringstream os;
  for (const auto& e : root_.entries()) os << e.key << " = " << e.value << '\n';
  for (const auto& s : sections_) {
    os << '\n' << '[' << s.name() << "]\n";
    for (const auto& e : s.entries()) os << e.key << " = " << e.value << '\n';
  }
  return os.str();
}

}  // namespace ngrc
