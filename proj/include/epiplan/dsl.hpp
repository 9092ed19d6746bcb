#pragma once

#include "epiplan/planning.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiplan {

struct SourceSpan {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t end_column = 0;
};

struct Diagnostic {
  SourceSpan span;
  std::string message;

  // file:line:col: message
  std::string format() const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Parses and validates a problem. Throws ParseError carrying every diagnostic found.
Problem parse_problem(std::string_view text, std::string_view file = "<input>");

// Reads a .epl file. I/O failures are reported as a ParseError at line 0.
Problem load_problem(const std::filesystem::path& path);

// Parses a formula against the problem's vocabulary.
Formula parse_formula(std::string_view text, const Problem& problem, std::string_view file = "<query>");

// Emits text that parse_problem maps back to an identical Problem.
std::string print_problem(const Problem& problem);

}  // namespace epiplan
