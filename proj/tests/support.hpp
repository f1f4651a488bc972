#pragma once

#include <string>
#include <vector>

#include "ramp/common.hpp"

namespace ramp_test {

// Collects warnings for the lifetime of the object instead of printing them.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = ramp::set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { ramp::set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  bool saw(const std::string& needle) const {
    for (const auto& m : messages)
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }

  std::vector<std::string> messages;

 private:
  ramp::WarningHandler previous_;
};

}  // namespace ramp_test
