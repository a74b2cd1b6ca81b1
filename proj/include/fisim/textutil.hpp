/*
 * Copyright 2026 The fisim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FISIM_TEXTUTIL_HPP
#define FISIM_TEXTUTIL_HPP

#include <cstdio>
#include <string>

namespace fisim {

// Shortest decimal form at the given %g precision, locale-independent.
// Precision 17 round-trips doubles exactly; reports use 12.
inline std::string formatReal(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

}  // namespace fisim

#endif  // FISIM_TEXTUTIL_HPP
