#include "cli/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <optional>
#include <vector>

namespace miub::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s, int base) {
  if (s.empty()) return std::nullopt;
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<Address> parse_address(std::string_view s) {
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return parse_number<Address>(s.substr(2), 16);
  return parse_number<Address>(s, 10);
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

TaskTrace parse_trace(std::string_view text) {
  TaskTrace trace;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));

    const auto words = split_ws(line);
    if (words.front() != "access") throw ParseError(line_no, "unknown directive '" + std::string(words.front()) + "'");
    if (words.size() < 2) throw ParseError(line_no, "access needs an address");

    const auto addr = parse_address(words[1]);
    if (!addr) throw ParseError(line_no, "malformed address '" + std::string(words[1]) + "'");

    Access a{*addr, 0, false};
    bool seen_gap = false, seen_crit = false;
    for (std::size_t k = 2; k < words.size(); ++k) {
      const auto w = words[k];
      const auto eq = w.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value, got '" + std::string(w) + "'");
      const auto key = w.substr(0, eq);
      const auto val = w.substr(eq + 1);
      if (key == "gap") {
        if (seen_gap) throw ParseError(line_no, "gap given twice");
        seen_gap = true;
        if (!val.empty() && val.front() == '-') throw ParseError(line_no, "negative gap " + std::string(val));
        const auto g = parse_number<Cycle>(val, 10);
        if (!g) throw ParseError(line_no, "malformed gap '" + std::string(val) + "'");
        a.gap_before = *g;
      } else if (key == "crit") {
        if (seen_crit) throw ParseError(line_no, "crit given twice");
        seen_crit = true;
        if (val != "0" && val != "1") throw ParseError(line_no, "crit must be 0 or 1, got '" + std::string(val) + "'");
        a.critical = val == "1";
      } else {
        throw ParseError(line_no, "unknown field '" + std::string(key) + "'");
      }
    }
    trace.accesses.push_back(a);
  }
  return trace;
}

std::string render_trace(const TaskTrace& trace) {
  std::string out;
  char buf[96];
  for (const auto& a : trace.accesses) {
    std::snprintf(buf, sizeof buf, "access 0x%llx gap=%lld crit=%d\n", static_cast<unsigned long long>(a.address),
                  static_cast<long long>(a.gap_before), a.critical ? 1 : 0);
    out += buf;
  }
  return out;
}

std::uint64_t trace_digest(const TaskTrace& trace) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render_trace(trace)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace miub::cli
