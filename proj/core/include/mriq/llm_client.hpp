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

#include <string>
#include <vector>

#include "mriq/error.hpp"

namespace mriq {

/// Provider-agnostic chat-completions client configuration. The bearer
/// token is read from the environment variable named by token_env; secrets
/// never travel through flags or config files.
struct LlmClientConfig {
    std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string token_env = "LLM_API_KEY";
    double timeout_seconds = 30.0;
    int max_retries = 2;
    double temperature = 0.2;
    std::string model;        // optional; sent when nonempty
    bool strict_json = false;  // judge parsing: require {"score": <number>}

    void validate() const;  // throws config_error
};

/// Sends one chat request and returns the assistant message content.
/// Retries transport failures max_retries times with exponential backoff.
/// Throws network_error when every attempt fails and malformed_response
/// when the reply is not a chat-completions payload.
std::string chat_completion(const LlmClientConfig& cfg, const std::string& system_prompt,
                            const std::string& user_prompt);

/// Numeric substrings of a text, in order (digits with optional decimal
/// part). Used to enforce number preservation across paraphrases.
std::vector<std::string> extract_numbers(const std::string& text);

}  // namespace mriq
