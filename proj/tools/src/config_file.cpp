#include <charconv>
#include <string>

#include "funkgeo/cli.hpp"

namespace funkgeo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw UsageError("config line " + std::to_string(line) + ": " + message);
}

template <typename T>
T parse_number(std::string_view text, int line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) fail(line, "invalid number '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view text, int line) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(line, "invalid boolean '" + std::string(text) + "'");
}

}  // namespace

void apply_config_text(std::string_view text, RunConfig& config) {
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    std::string_view line = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    ++line_no;

    // '#' or ';' opens a comment at line start or after whitespace, so values
    // such as "x:ball(0.6);y:annulus(1,2)" keep their separators.
    for (std::size_t k = 0; k < line.size(); ++k) {
      if ((line[k] == '#' || line[k] == ';') && (k == 0 || line[k - 1] == ' ' || line[k - 1] == '\t')) {
        line = line.substr(0, k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string v(value);

    if (section == "metric") {
      if (key == "name") config.metric = v;
      else if (key == "expr") config.metric_expr = v;
      else if (key == "deform") config.deform = v;
      else if (key == "deform_expr") config.deform_expr = v;
      else fail(line_no, "unknown key '" + key + "' in [metric]");
    } else if (section == "candidate") {
      if (key == "name") config.candidate = v;
      else if (key == "expr") config.candidate_expr = v;
      else if (key == "degree") config.candidate_degree = parse_number<int>(value, line_no);
      else if (key == "c") config.c = parse_number<double>(value, line_no);
      else if (key == "a") config.a = v;
      else fail(line_no, "unknown key '" + key + "' in [candidate]");
    } else if (section == "sampling") {
      if (key == "n") config.n = parse_number<int>(value, line_no);
      else if (key == "samples") config.samples = parse_number<int>(value, line_no);
      else if (key == "seed") config.seed = parse_number<std::uint64_t>(value, line_no);
      else if (key == "domain") config.domain = v;
      else fail(line_no, "unknown key '" + key + "' in [sampling]");
    } else if (section == "tolerances") {
      bool known = false;
      for (const auto& name : tolerance_names()) known = known || name == key;
      if (!known) fail(line_no, "unknown tolerance '" + key + "'");
      config.tolerances[key] = parse_number<double>(value, line_no);
    } else if (section == "search") {
      if (key == "restarts") config.restarts = parse_number<int>(value, line_no);
      else if (key == "max_iter") config.max_iter = parse_number<int>(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [search]");
    } else if (section == "output") {
      if (key == "json") config.json_path = v;
      else if (key == "assert") config.assert_mode = parse_bool(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [output]");
    } else {
      fail(line_no, section.empty() ? "key outside of a section" : "unknown section [" + section + "]");
    }
  }
}

}  // namespace funkgeo
