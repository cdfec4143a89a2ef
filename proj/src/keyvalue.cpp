// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/keyvalue.hpp"

#include <cmath>
#include <istream>
#include <locale>
#include <sstream>
#include <fmt/format.h>
#include "mllg/errors.hpp"

namespace mllg
{

namespace
{

std::string Trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<KeyValue> ReadKeyValues(std::istream &in, const std::string &what)
{
  std::vector<KeyValue> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos)
    {
      line.erase(pos);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError(fmt::format("{} line {}: expected 'key = value'", what, line_no));
    }
    out.push_back({Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), line_no});
  }
  return out;
}

double ParseNumber(const KeyValue &kv, const std::string &what)
{
  std::istringstream vs(kv.value);
  vs.imbue(std::locale::classic());
  double v = 0.0;
  vs >> v;
  if (vs.fail() || !(vs >> std::ws).eof() || !std::isfinite(v))
  {
    throw ConfigError(
        fmt::format("{} line {}: malformed value '{}' for '{}'", what, kv.line, kv.value, kv.key));
  }
  return v;
}

int ParseInteger(const KeyValue &kv, const std::string &what)
{
  const double v = ParseNumber(kv, what);
  if (v != std::trunc(v) || std::fabs(v) > 2e9)
  {
    throw ConfigError(
        fmt::format("{} line {}: '{}' expects an integer (got '{}')", what, kv.line, kv.key, kv.value));
  }
  return static_cast<int>(v);
}

}  // namespace mllg
