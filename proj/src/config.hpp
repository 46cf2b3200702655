#pragma once

#include <map>
#include <string>
#include <vector>

#include "measures.hpp"

namespace hw {

/// Minimal structured-text config: `[section]` headers, `key = value`
/// lines, `#` comments. Values are strings ("..."), booleans, numbers,
/// flat numeric arrays, or arrays of numeric arrays. Accessors throw
/// ConfigError naming the offending section.key.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key,
                   double fallback) const;
  long long integer(const std::string& section, const std::string& key) const;
  long long integer_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  std::string str(const std::string& section, const std::string& key) const;
  std::string str_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::vector<double> number_list(const std::string& section,
                                  const std::string& key) const;
  std::vector<std::vector<double>> nested_list(const std::string& section,
                                               const std::string& key) const;

  /// Measure from `<prefix>atoms` / `<prefix>beta` keys in a section.
  CharacteristicMeasure measure(const std::string& section,
                                const std::string& prefix = "nu_") const;

  /// Raw text the config was parsed from (recorded in manifests).
  const std::string& text() const { return text_; }

 private:
  const std::string& raw(const std::string& section,
                         const std::string& key) const;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string text_;
};

}  // namespace hw
