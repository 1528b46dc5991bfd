/*
 * Copyright (C) 2026 The irsplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef IRSPLAN__TEXTIO_HPP
#define IRSPLAN__TEXTIO_HPP

#include <string>
#include <string_view>
#include <vector>

namespace irsplan {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict parse of a whole field; throws Error(Parse) mentioning `what`.
double parse_double(std::string_view text, const std::string& what);
long long parse_int(std::string_view text, const std::string& what);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace irsplan

#endif // IRSPLAN__TEXTIO_HPP
