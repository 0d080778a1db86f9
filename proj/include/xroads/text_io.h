/* Copyright 2026 The xroads Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef XROADS_TEXT_IO_H_
#define XROADS_TEXT_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace xroads {

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

// Minimal CSV reader for the comma-separated, unquoted files this project
// writes. Lines starting with '#' are skipped. The first remaining row is the
// header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws if missing.
  std::size_t Column(std::string_view name) const;
};

CsvTable ParseCsv(const std::string& text);
CsvTable ReadCsv(const std::filesystem::path& path);

double ParseDouble(std::string_view text);
long long ParseInt(std::string_view text);

}  // namespace xroads

#endif  // XROADS_TEXT_IO_H_
