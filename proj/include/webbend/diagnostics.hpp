#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace webbend {

enum class Severity { info, warning, error };

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "unknown";
}

struct Diagnostic {
  Severity severity = Severity::warning;
  std::string code;     // stable machine-readable tag, e.g. "self_loop_dropped"
  std::string message;
  std::string subject;  // domain, file or metric the entry concerns; may be empty
  std::size_t row = 0;  // 1-based source row, 0 when not applicable
};

// Data-quality side channel. Results never carry warnings inline; producers append here.
class Diagnostics {
 public:
  void add(Severity severity, std::string code, std::string message, std::string subject = {}, std::size_t row = 0) {
    entries_.push_back({severity, std::move(code), std::move(message), std::move(subject), row});
  }
  void warn(std::string code, std::string message, std::string subject = {}, std::size_t row = 0) {
    add(Severity::warning, std::move(code), std::move(message), std::move(subject), row);
  }
  void info(std::string code, std::string message, std::string subject = {}, std::size_t row = 0) {
    add(Severity::info, std::move(code), std::move(message), std::move(subject), row);
  }

  const std::vector<Diagnostic>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  std::size_t count(const std::string& code) const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += (e.code == code);
    return n;
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
      nlohmann::ordered_json j;
      j["severity"] = to_string(e.severity);
      j["code"] = e.code;
      j["message"] = e.message;
      if (!e.subject.empty()) j["subject"] = e.subject;
      if (e.row != 0) j["row"] = e.row;
      arr.push_back(std::move(j));
    }
    return arr;
  }

 private:
  std::vector<Diagnostic> entries_;
};

}  // namespace webbend
