// Copyright 2026 The Galactic Authors.
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

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>

#include "galactic/errors.h"
#include "galactic/ordering_model.h"

namespace galactic {

namespace {

constexpr int kModelVersion = 1;

double parse_double(std::string_view text, std::size_t line_no) {
  double value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "bad number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

void write_model(std::ostream& out, const OrderingModel& model) {
  out << "#lang " << model.language << '\n';
  out << "#pos " << pos_class_code(model.pos_class) << '\n';
  out << "#version " << kModelVersion << '\n';
  out << "#iterations " << model.meta.iterations << '\n';
  out << "#objective " << format_double(model.meta.objective) << '\n';
  out << "#gradient_norm " << format_double(model.meta.gradient_norm) << '\n';
  out << "#converged " << (model.meta.converged ? 1 : 0) << '\n';
  std::map<std::string, double> lines;
  for (const auto& [name, w] : model.weights) {
    if (!is_h_feature(name) || model.h_whitelist.contains(name)) lines[name] = w;
  }
  for (const std::string& name : model.h_whitelist) lines.try_emplace(name, 0.0);
  for (const auto& [name, w] : lines) out << name << '\t' << format_double(w) << '\n';
}

OrderingModel read_model(std::istream& in) {
  OrderingModel model;
  bool saw_pos = false;
  bool saw_version = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t space = line.find(' ');
      const std::string key = line.substr(1, space == std::string::npos ? std::string::npos : space - 1);
      const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
      if (key == "lang") {
        model.language = value;
      } else if (key == "pos") {
        model.pos_class = parse_pos_class(value);
        saw_pos = true;
      } else if (key == "version") {
        if (value != std::to_string(kModelVersion)) {
          throw ParseError(line_no, "unsupported model version '" + value + "'");
        }
        saw_version = true;
      } else if (key == "iterations") {
        model.meta.iterations = static_cast<int>(parse_double(value, line_no));
      } else if (key == "objective") {
        model.meta.objective = parse_double(value, line_no);
      } else if (key == "gradient_norm") {
        model.meta.gradient_norm = parse_double(value, line_no);
      } else if (key == "converged") {
        model.meta.converged = value == "1";
      }
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(line_no, "expected <feature>\\t<weight>");
    }
    std::string name = line.substr(0, tab);
    const double w = parse_double(std::string_view(line).substr(tab + 1), line_no);
    if (is_h_feature(name)) model.h_whitelist.insert(name);
    model.weights[std::move(name)] = w;
  }
  if (!saw_pos || !saw_version) {
    throw ParseError(0, "model file lacks #pos or #version header");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const OrderingModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  write_model(out, model);
  if (!out) throw IoError("failed writing model " + path.string());
}

OrderingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model " + path.string());
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

}  // namespace galactic
