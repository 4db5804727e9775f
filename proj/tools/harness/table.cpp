// Copyright 2026 The nhqubit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nhq::harness {

void Table::add(Row row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("Table::add: row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << t.columns[i].name;
  }
  out << '\n';
  for (const Row& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&out](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              out << format_double(v);
            } else if constexpr (std::is_same_v<V, std::int64_t>) {
              out << v;
            } else if constexpr (std::is_same_v<V, std::string>) {
              out << v;
            }
          },
          row[i]);
    }
    out << '\n';
  }
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::json j;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : t.columns) j["columns"].push_back(c.name);
  j["rows"] = nlohmann::json::array();
  for (const Row& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& cell : row) {
      std::visit(
          [&r](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) {
              r.push_back(nullptr);
            } else {
              r.push_back(v);
            }
          },
          cell);
    }
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

nlohmann::json column_units(const Table& t) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& c : t.columns) j[c.name] = c.unit;
  return j;
}

}  // namespace nhq::harness
