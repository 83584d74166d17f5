#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "miub/model.hpp"

namespace miub::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// `0x`-prefixed hex or plain decimal.
std::optional<Address> parse_address(std::string_view text);

/// Line-oriented trace text:
///   # comment
///   access <hex-or-dec address> gap=<n> crit=<0|1>
/// gap and crit may be omitted (0) and may appear in either order.
TaskTrace parse_trace(std::string_view text);

/// Canonical form: one `access 0x<hex> gap=<n> crit=<0|1>` line per access.
std::string render_trace(const TaskTrace& trace);

/// FNV-1a over the canonical rendering.
std::uint64_t trace_digest(const TaskTrace& trace);

}  // namespace miub::cli
