#pragma once

#include <stdexcept>
#include <string>

namespace gyrokin {

// Violated mathematical precondition (zero gyrofrequency, point off the
// kernel support, degenerate gyration radius, ...).
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration; message carries the JSON path of the offending field.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Time-step validity failure (CFL violation, positivity loss).
class step_error : public std::runtime_error {
 public:
  explicit step_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gyrokin
