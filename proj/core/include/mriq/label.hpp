// Copyright 2026 the mriq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>

namespace mriq {

/// Three-tier quality label, totally ordered Bad < Medium < Good.
enum class QualityLabel : int { bad = 0, medium = 1, good = 2 };

inline const char* label_name(QualityLabel l) {
    switch (l) {
        case QualityLabel::bad: return "Bad";
        case QualityLabel::medium: return "Medium";
        case QualityLabel::good: return "Good";
    }
    return "?";
}

inline std::optional<QualityLabel> label_from_name(const std::string& s) {
    if (s == "Bad") return QualityLabel::bad;
    if (s == "Medium") return QualityLabel::medium;
    if (s == "Good") return QualityLabel::good;
    return std::nullopt;
}

}  // namespace mriq
