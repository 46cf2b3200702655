#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hw {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          const std::string& why) {
  fail(ErrorCode::config_error,
       "config key " + (section.empty() ? key : section + "." + key) + ": " +
           why);
}

std::vector<std::vector<double>> parse_rows(const std::string& s,
                                            const std::string& section,
                                            const std::string& key,
                                            bool nested) {
  std::vector<std::vector<double>> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto expect = [&](char c) {
    skip();
    if (i >= s.size() || s[i] != c)
      bad_key(section, key, std::string("expected '") + c + "'");
    ++i;
  };
  auto number = [&]() -> double {
    skip();
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s.substr(i), &pos);
    } catch (const std::exception&) {
      bad_key(section, key, "malformed number");
    }
    i += pos;
    return v;
  };
  expect('[');
  skip();
  if (i < s.size() && s[i] == ']') {
    ++i;
  } else if (nested) {
    for (;;) {
      expect('[');
      std::vector<double> row;
      skip();
      if (i < s.size() && s[i] != ']') {
        for (;;) {
          row.push_back(number());
          skip();
          if (i < s.size() && s[i] == ',') {
            ++i;
            continue;
          }
          break;
        }
      }
      expect(']');
      out.push_back(std::move(row));
      skip();
      if (i < s.size() && s[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    expect(']');
  } else {
    std::vector<double> row;
    for (;;) {
      row.push_back(number());
      skip();
      if (i < s.size() && s[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    expect(']');
    out.push_back(std::move(row));
  }
  skip();
  if (i != s.size()) bad_key(section, key, "trailing characters after array");
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.text_ = text;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorCode::config_error,
             "config line " + std::to_string(lineno) + ": unclosed section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::config_error,
           "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      fail(ErrorCode::config_error,
           "config line " + std::to_string(lineno) + ": empty key or value");
    cfg.sections_[section][key] = val;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) != 0;
}

const std::string& Config::raw(const std::string& section,
                               const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key))
    bad_key(section, key, "missing");
  return it->second.at(key);
}

double Config::number(const std::string& section,
                      const std::string& key) const {
  const std::string& v = raw(section, key);
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad_key(section, key, "not a number");
  }
  if (pos != v.size()) bad_key(section, key, "not a number");
  return out;
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long long Config::integer(const std::string& section,
                          const std::string& key) const {
  double v = number(section, key);
  long long n = std::llround(v);
  if (static_cast<double>(n) != v) bad_key(section, key, "not an integer");
  return n;
}

long long Config::integer_or(const std::string& section,
                             const std::string& key,
                             long long fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

std::string Config::str(const std::string& section,
                        const std::string& key) const {
  const std::string& v = raw(section, key);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return v.substr(1, v.size() - 2);
  return v;
}

std::string Config::str_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? str(section, key) : fallback;
}

std::vector<double> Config::number_list(const std::string& section,
                                        const std::string& key) const {
  auto rows = parse_rows(raw(section, key), section, key, false);
  return rows.empty() ? std::vector<double>{} : rows[0];
}

std::vector<std::vector<double>> Config::nested_list(
    const std::string& section, const std::string& key) const {
  return parse_rows(raw(section, key), section, key, true);
}

CharacteristicMeasure Config::measure(const std::string& section,
                                      const std::string& prefix) const {
  CharacteristicMeasure m;
  if (has(section, prefix + "atoms")) {
    auto rows = nested_list(section, prefix + "atoms");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != 2)
        bad_key(section, prefix + "atoms[" + std::to_string(i) + "]",
                "atom rows are [q, w]");
      try {
        m.add_atom(rows[i][0], rows[i][1]);
      } catch (const Error& e) {
        bad_key(section, prefix + "atoms[" + std::to_string(i) + "]",
                e.what());
      }
    }
  }
  if (has(section, prefix + "beta")) {
    auto rows = nested_list(section, prefix + "beta");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != 3)
        bad_key(section, prefix + "beta[" + std::to_string(i) + "]",
                "beta rows are [a, b, w]");
      try {
        m.add_beta(rows[i][0], rows[i][1], rows[i][2]);
      } catch (const Error& e) {
        bad_key(section, prefix + "beta[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  return m;
}

}  // namespace hw
