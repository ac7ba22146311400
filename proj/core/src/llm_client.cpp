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

#include "mriq/llm_client.hpp"

#include <httplib.h>

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace mriq {

namespace {

struct SplitUrl {
    std::string base;  // scheme://host:port
    std::string path;  // /v1/...
};

SplitUrl split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(Errc::config_error, "endpoint must include a scheme, e.g. http://host:port/path");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

void LlmClientConfig::validate() const {
    if (endpoint.empty()) throw Error(Errc::config_error, "LLM endpoint is empty");
    if (!(timeout_seconds > 0.0)) throw Error(Errc::config_error, "timeout must be > 0");
    if (max_retries < 0) throw Error(Errc::config_error, "max_retries must be >= 0");
    split_endpoint(endpoint);
}

std::string chat_completion(const LlmClientConfig& cfg, const std::string& system_prompt,
                            const std::string& user_prompt) {
    cfg.validate();
    const SplitUrl url = split_endpoint(cfg.endpoint);

    nlohmann::json body = {
        {"messages",
         {{{"role", "system"}, {"content", system_prompt}}, {{"role", "user"}, {"content", user_prompt}}}},
        {"temperature", cfg.temperature},
    };
    if (!cfg.model.empty()) body["model"] = cfg.model;
    const std::string payload = body.dump();

    httplib::Client client(url.base);
    const auto timeout_ms = static_cast<int>(cfg.timeout_seconds * 1000.0);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    if (const char* token = std::getenv(cfg.token_env.c_str()); token && *token)
        client.set_bearer_token_auth(token);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto backoff = std::chrono::milliseconds(100L << std::min(attempt - 1, 4));
            std::this_thread::sleep_for(backoff);
        }
        auto res = client.Post(url.path, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP status " + std::to_string(res->status);
            // 4xx will not improve on retry
            if (res->status >= 400 && res->status < 500)
                throw Error(Errc::network_error, last_error + " from " + cfg.endpoint);
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::malformed_response, std::string("not a chat-completions payload: ") + e.what());
        }
    }
    throw Error(Errc::network_error, "request to " + cfg.endpoint + " failed after " +
                                         std::to_string(cfg.max_retries + 1) + " attempts: " + last_error);
}

std::vector<std::string> extract_numbers(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            out.push_back(text.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace mriq
