// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Typed field access for the JSON readers; failures carry the field path.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "dimfac/error.hpp"

namespace dimfac::jsonutil {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw Error(Errc::config, fmt::format("{}: {}", path, msg));
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path == "$" ? std::string(key) : path + "." + key, "missing required field");
  return *it;
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path == "$" ? it.key() : path + "." + it.key(), "unknown field");
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) fail(path, "integer out of range");
  return static_cast<int>(v);
}

inline std::uint64_t unsigned64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0 && v < 1.8e19 && v == std::floor(v)) return static_cast<std::uint64_t>(v);
  }
  fail(path, "expected a non-negative integer");
}

inline std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

// Pretty-printed JSON with arrays of scalars kept on one line.
template <class Json>
std::string compact_dump(const Json& j) {
  const std::string s = j.dump(2);
  std::string out;
  out.reserve(s.size());
  auto skip_string = [&](std::size_t i) {  // i at the opening quote; returns one past the closing quote
    for (++i; i < s.size() && s[i] != '"'; ++i)
      if (s[i] == '\\') ++i;
    return i + 1;
  };
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '"') {
      const std::size_t e = skip_string(i);
      out.append(s, i, e - i);
      i = e;
      continue;
    }
    if (s[i] != '[') {
      out += s[i++];
      continue;
    }
    std::size_t j = i + 1;
    bool flat = true;
    while (j < s.size() && s[j] != ']') {
      if (s[j] == '[' || s[j] == '{') {
        flat = false;
        break;
      }
      j = s[j] == '"' ? skip_string(j) : j + 1;
    }
    if (!flat) {
      out += s[i++];
      continue;
    }
    out += '[';
    for (std::size_t k = i + 1; k < j;) {
      if (s[k] == '"') {
        const std::size_t e = skip_string(k);
        out.append(s, k, e - k);
        k = e;
      } else if (s[k] == ',') {
        out += ", ";
        ++k;
      } else {
        if (s[k] != ' ' && s[k] != '\n') out += s[k];
        ++k;
      }
    }
    out += ']';
    i = j + 1;
  }
  return out;
}

}  // namespace dimfac::jsonutil
