// Stand-in external optimizer for protocol tests. Reads an OpenQASM 2.0
// program (stdin, or an input path when two trailing paths are given),
// writes the reply program (stdout or the output path).
//
// Usage: mock_oracle [MODE] [ARGS] [IN OUT]
//   identity           parse and echo the program back (default)
//   cancel-hh          delete adjacent identical h pairs
//   sleep SECONDS      wait, then behave like identity
//   fail [CODE]        exit nonzero without replying
//   garbage            reply with text that is not QASM
//   widen              reply on one more qubit than the request declared

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "popqc/qasm.hpp"

using namespace popqc;

namespace {

std::vector<Gate> drop_adjacent_h_pairs(std::vector<Gate> gates) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < gates.size(); ++i) {
      if (gates[i].kind == GateKind::H && gates[i + 1] == gates[i]) {
        gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(i),
                    gates.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return gates;
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "identity";
  int arg = 2;
  double sleep_seconds = 0.0;
  int fail_code = 0;
  if (mode == "sleep") {
    sleep_seconds = argc > arg ? std::atof(argv[arg]) : 1.0;
    ++arg;
  } else if (mode == "fail") {
    fail_code = argc > arg && argv[arg][0] != '/' ? std::atoi(argv[arg++]) : 3;
  }

  std::string in_path, out_path;
  if (argc >= arg + 2) {
    in_path = argv[arg];
    out_path = argv[arg + 1];
  }

  if (fail_code != 0) {
    return fail_code;
  }

  std::string input;
  if (in_path.empty()) {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    input = ss.str();
  } else {
    input = read_text_file(in_path);
  }

  if (sleep_seconds > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(sleep_seconds));
  }

  std::string reply;
  if (mode == "garbage") {
    reply = "this is not a qasm program\n";
  } else {
    ParsedProgram program = parse_qasm(input);
    if (mode == "cancel-hh") {
      program.gates = drop_adjacent_h_pairs(program.gates);
    } else if (mode == "widen") {
      program.num_qubits += 1;
      program.gates.push_back(Gate::x(program.num_qubits - 1));
    }
    reply = serialize_qasm(program);
  }

  if (out_path.empty()) {
    std::fputs(reply.c_str(), stdout);
  } else {
    write_text_file(out_path, reply);
  }
  return 0;
}
