#include <cstdlib>

#include "graphtale/gen/generator.hpp"
#include "httplib.h"
#include "json.hpp"

namespace graphtale::gen {

std::string HttpBackend::generate(const std::string& prompt) {
    if (config_.max_prompt_chars > 0 && prompt.size() > config_.max_prompt_chars)
        throw BackendOverflow(prompt.size(), config_.max_prompt_chars);

    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw BackendUnavailable("environment variable " + config_.api_key_env + " is not set");

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    nlohmann::json body{{"model", config_.model}, {"prompt", prompt}};
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res)
        throw BackendUnavailable("no response from " + config_.base_url + " (" +
                                 httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw BackendUnavailable("HTTP " + std::to_string(res->status) + " from backend");

    try {
        return nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const std::exception& e) {
        throw BackendUnavailable(std::string("malformed backend response: ") + e.what());
    }
}

}  // namespace graphtale::gen
