#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popqc/gate.hpp"

namespace popqc {

/// A parsed OpenQASM 2.0 program restricted to the {h, x, cx, rz} gate set.
struct ParsedProgram {
  std::uint32_t num_qubits{0};
  std::vector<Gate> gates;

  bool operator==(const ParsedProgram&) const = default;
};

/// Parse failure with source position. Columns and lines are 1-based.
class QasmError : public std::runtime_error {
 public:
  QasmError(std::string message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parse an OpenQASM 2.0 program.
///
/// Accepted subset: optional `OPENQASM 2.0;` header, optional
/// `include "...";`, exactly one `qreg` declaration, and gate statements
/// `h`, `x`, `cx`, `rz(expr)` where expr is a signed decimal literal, `pi`,
/// or a pi fraction such as `pi/4` or `3*pi/2`. `//` comments and blank
/// lines are allowed; both LF and CRLF line endings work. `creg` and
/// `measure` are rejected: this tool does not define optimization of
/// measured circuits, so they fail loudly instead of being dropped.
ParsedProgram parse_qasm(std::string_view text);

/// Serialize a program back to OpenQASM 2.0 text (LF line endings).
/// RZ angles are printed with 17 significant digits, so parsing the output
/// recovers bit-identical doubles.
std::string serialize_qasm(const ParsedProgram& program);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace popqc
