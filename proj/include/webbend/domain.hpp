#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "webbend/errors.hpp"

namespace webbend {

// Reduce a URL or host string to a bare domain: lowercase, no scheme,
// userinfo, path, query, port, leading "www." labels, or stray dots.
inline std::string normalize_domain(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());

  if (auto scheme = s.find("://"); scheme != std::string::npos) s.erase(0, scheme + 3);
  if (auto cut = s.find_first_of("/?#"); cut != std::string::npos) s.erase(cut);
  if (auto at = s.rfind('@'); at != std::string::npos) s.erase(0, at + 1);
  if (auto port = s.find(':'); port != std::string::npos) s.erase(port);

  auto stray = [](char c) { return c == '.' || std::isspace(static_cast<unsigned char>(c)); };
  for (;;) {
    while (!s.empty() && stray(s.back())) s.pop_back();
    while (!s.empty() && stray(s.front())) s.erase(0, 1);
    if (s.rfind("www.", 0) == 0) {
      s.erase(0, 4);
      continue;
    }
    break;
  }
  return s;
}

// A normalized registrable domain. Construction normalizes; equality is on the normalized form.
class DomainId {
 public:
  DomainId() = default;
  explicit DomainId(std::string_view raw) : name_(normalize_domain(raw)) {
    if (name_.empty()) throw InvalidDomain("empty domain after normalization: '" + std::string(raw) + "'");
  }

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend bool operator==(const DomainId&, const DomainId&) = default;
  friend std::strong_ordering operator<=>(const DomainId&, const DomainId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const DomainId& d) { return os << d.name_; }

 private:
  std::string name_;
};

inline namespace literals {
inline DomainId operator""_dom(const char* s, std::size_t n) { return DomainId(std::string_view(s, n)); }
}  // namespace literals

// Label of one cell in a target partition ("EU", "L0", ...).
class GroupId {
 public:
  GroupId() = default;
  explicit GroupId(std::string label) : label_(std::move(label)) {}

  const std::string& str() const noexcept { return label_; }

  friend bool operator==(const GroupId&, const GroupId&) = default;
  friend std::strong_ordering operator<=>(const GroupId&, const GroupId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const GroupId& g) { return os << g.label_; }

 private:
  std::string label_;
};

}  // namespace webbend

template <>
struct std::hash<webbend::DomainId> {
  std::size_t operator()(const webbend::DomainId& d) const noexcept { return std::hash<std::string>{}(d.str()); }
};
