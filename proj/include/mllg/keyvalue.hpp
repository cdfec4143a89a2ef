// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_KEYVALUE_HPP
#define MLLG_KEYVALUE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mllg
{

struct KeyValue
{
  std::string key;
  std::string value;
  int line = 0;
};

// Reads "key = value" lines; '#' starts a comment, blank lines are skipped. Throws
// ConfigError naming `what` and the line for lines without '='.
std::vector<KeyValue> ReadKeyValues(std::istream &in, const std::string &what);

// Classic-locale number parsing; the whole value must be consumed.
double ParseNumber(const KeyValue &kv, const std::string &what);
int ParseInteger(const KeyValue &kv, const std::string &what);

}  // namespace mllg

#endif  // MLLG_KEYVALUE_HPP
