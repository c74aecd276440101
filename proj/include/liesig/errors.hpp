#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liesig {

/// A bracket of Lyndon basis elements whose depth exceeds the truncation level.
class truncation_overflow : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// A tensor that is not in the image of the free Lie algebra.
class not_lie_element_error : public std::runtime_error {
public:
  not_lie_element_error(const std::string& what, double residual_norm)
      : std::runtime_error(what + " (residual norm " + std::to_string(residual_norm) + ")"),
        residual_norm_(residual_norm) {}

  double residual_norm() const noexcept { return residual_norm_; }

private:
  double residual_norm_;
};

/// Malformed textual input. `line()` is 1-based; 0 means "no particular line".
class format_error : public std::runtime_error {
public:
  format_error(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class empty_input_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Loaded data disagrees with an independently derived reference.
class integrity_error : public std::runtime_error {
public:
  integrity_error(const std::string& what, std::string element)
      : std::runtime_error(what), element_(std::move(element)) {}

  const std::string& element() const noexcept { return element_; }

private:
  std::string element_;
};

}  // namespace liesig
