#include "popqc/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace popqc {

QasmError::QasmError(std::string message, int line, int column)
    : std::runtime_error("qasm:" + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + std::move(message)),
      line_(line),
      column_(column) {}

namespace {

// Hand-rolled scanner/parser for the small statement grammar. Keeping it
// character-driven makes line/column reporting exact.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParsedProgram run() {
    skip_trivia();
    if (peek_word("OPENQASM")) {
      expect_word("OPENQASM");
      skip_trivia();
      // version token, e.g. "2.0"
      std::string version = take_while([](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
      });
      if (version != "2.0") {
        fail("unsupported OPENQASM version '" + version + "'");
      }
      expect_char(';');
    }
    skip_trivia();
    while (peek_word("include")) {
      expect_word("include");
      skip_trivia();
      expect_char('"');
      take_while([](char c) { return c != '"' && c != '\n'; });
      expect_char('"');
      expect_char(';');
      skip_trivia();
    }

    while (true) {
      skip_trivia();
      if (at_end()) break;
      statement();
    }
    if (!saw_qreg_) {
      fail("missing qreg declaration");
    }
    return std::move(program_);
  }

 private:
  void statement() {
    int line = line_, col = col_;
    std::string word = identifier();
    if (word == "qreg") {
      if (saw_qreg_) {
        throw QasmError("multiple qreg declarations", line, col);
      }
      skip_trivia();
      reg_name_ = identifier();
      expect_char('[');
      long n = integer();
      expect_char(']');
      expect_char(';');
      if (n <= 0) {
        throw QasmError("qreg size must be positive", line, col);
      }
      program_.num_qubits = static_cast<std::uint32_t>(n);
      saw_qreg_ = true;
      return;
    }
    if (word == "creg" || word == "measure" || word == "barrier" ||
        word == "reset") {
      throw QasmError("'" + word + "' is not supported: only pure {h, x, cx, rz} circuits can be optimized",
                      line, col);
    }
    if (!saw_qreg_) {
      throw QasmError("gate statement before qreg declaration", line, col);
    }
    if (word == "h" || word == "x") {
      std::uint32_t q = qubit_operand();
      expect_char(';');
      program_.gates.push_back(word == "h" ? Gate::h(q) : Gate::x(q));
      return;
    }
    if (word == "cx") {
      std::uint32_t c = qubit_operand();
      expect_char(',');
      std::uint32_t t = qubit_operand();
      expect_char(';');
      if (c == t) {
        throw QasmError("cx control and target must differ", line, col);
      }
      program_.gates.push_back(Gate::cnot(c, t));
      return;
    }
    if (word == "rz") {
      expect_char('(');
      double theta = angle_expr();
      expect_char(')');
      std::uint32_t q = qubit_operand();
      expect_char(';');
      program_.gates.push_back(Gate::rz(q, theta));
      return;
    }
    throw QasmError("unsupported gate name '" + word + "'", line, col);
  }

  // angle := ['-'|'+'] (number ['*' pi ['/' number]] | pi ['/' number])
  double angle_expr() {
    skip_trivia();
    int line = line_, col = col_;
    double sign = 1.0;
    if (peek() == '-' || peek() == '+') {
      if (get() == '-') sign = -1.0;
      skip_trivia();
    }
    double value;
    if (peek_word("pi")) {
      expect_word("pi");
      value = std::numbers::pi;
      value = maybe_divide(value);
    } else {
      value = number();
      skip_trivia();
      if (peek() == '*') {
        get();
        skip_trivia();
        if (!peek_word("pi")) fail("expected 'pi' after '*'");
        expect_word("pi");
        value *= std::numbers::pi;
        value = maybe_divide(value);
      }
    }
    value *= sign;
    if (!std::isfinite(value)) {
      throw QasmError("angle is not finite", line, col);
    }
    return value;
  }

  double maybe_divide(double value) {
    skip_trivia();
    if (peek() == '/') {
      get();
      skip_trivia();
      double denom = number();
      if (denom == 0.0) fail("division by zero in angle");
      value /= denom;
    }
    return value;
  }

  std::uint32_t qubit_operand() {
    skip_trivia();
    int line = line_, col = col_;
    std::string name = identifier();
    if (name != reg_name_) {
      throw QasmError("unknown register '" + name + "'", line, col);
    }
    expect_char('[');
    long idx = integer();
    expect_char(']');
    if (idx < 0 || static_cast<std::uint64_t>(idx) >= program_.num_qubits) {
      throw QasmError("qubit index " + std::to_string(idx) + " out of range (qreg size " +
                          std::to_string(program_.num_qubits) + ")",
                      line, col);
    }
    return static_cast<std::uint32_t>(idx);
  }

  std::string identifier() {
    skip_trivia();
    int line = line_, col = col_;
    std::string word = take_while([](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
    if (word.empty()) {
      throw QasmError("expected identifier", line, col);
    }
    return word;
  }

  long integer() {
    skip_trivia();
    int line = line_, col = col_;
    std::string digits = take_while([](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (digits.empty()) {
      throw QasmError("expected integer", line, col);
    }
    return std::strtol(digits.c_str(), nullptr, 10);
  }

  double number() {
    skip_trivia();
    int line = line_, col = col_;
    // Decimal literal with optional fraction and exponent (strtod syntax,
    // but without leading sign: signs are handled by angle_expr).
    std::size_t start = pos_;
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (!at_end() && digit(peek())) get();
    if (!at_end() && peek() == '.') {
      get();
      while (!at_end() && digit(peek())) get();
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      get();
      if (!at_end() && (peek() == '+' || peek() == '-')) get();
      while (!at_end() && digit(peek())) get();
    }
    if (pos_ == start) {
      throw QasmError("expected number", line, col);
    }
    std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw QasmError("malformed number '" + token + "'", line, col);
    }
    return value;
  }

  bool peek_word(std::string_view word) {
    if (text_.substr(pos_, word.size()) != word) return false;
    char next = pos_ + word.size() < text_.size() ? text_[pos_ + word.size()] : '\0';
    return !(std::isalnum(static_cast<unsigned char>(next)) || next == '_');
  }

  void expect_word(std::string_view word) {
    skip_trivia();
    if (!peek_word(word)) {
      fail("expected '" + std::string(word) + "'");
    }
    for (std::size_t i = 0; i < word.size(); ++i) get();
  }

  void expect_char(char c) {
    skip_trivia();
    if (at_end() || peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    get();
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::string out;
    while (!at_end() && pred(peek())) out.push_back(get());
    return out;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (!at_end() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw QasmError(message, line_, col_);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string_view text_;
  std::size_t pos_{0};
  int line_{1};
  int col_{1};
  bool saw_qreg_{false};
  std::string reg_name_;
  ParsedProgram program_;
};

}  // namespace

ParsedProgram parse_qasm(std::string_view text) {
  return Parser(text).run();
}

std::string serialize_qasm(const ParsedProgram& program) {
  std::string out;
  out.reserve(64 + program.gates.size() * 16);
  out += "OPENQASM 2.0;\n";
  out += "include \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(program.num_qubits) + "];\n";
  char buf[96];
  for (const Gate& g : program.gates) {
    switch (g.kind) {
      case GateKind::H:
        std::snprintf(buf, sizeof(buf), "h q[%u];\n", g.q0);
        break;
      case GateKind::X:
        std::snprintf(buf, sizeof(buf), "x q[%u];\n", g.q0);
        break;
      case GateKind::Cnot:
        std::snprintf(buf, sizeof(buf), "cx q[%u],q[%u];\n", g.q0, g.q1);
        break;
      case GateKind::Rz:
        // 17 significant digits round-trip any 64-bit double exactly.
        std::snprintf(buf, sizeof(buf), "rz(%.17g) q[%u];\n", g.angle, g.q0);
        break;
    }
    out += buf;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace popqc
