#pragma once

// HTTP chat transport over cpp-httplib. Kept out of llm_gen.hpp so tests and
// offline runs never compile the socket layer.

#include <memory>
#include <string>

#include "httplib.h"

#include "synthcal/llm_gen.hpp"

namespace synthcal {

class HttpChatTransport : public ChatTransport {
public:
    explicit HttpChatTransport(const GenConfig& cfg) : cfg_(cfg) {
        // Endpoint is scheme://host[:port][/base-path], e.g.
        // http://localhost:8000/v1.
        std::string url = cfg.endpoint;
        std::size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw transport_error("endpoint '" + url + "' must start with http://");
        std::size_t path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = url;
        } else {
            base_ = url.substr(0, path_start);
            path_prefix_ = url.substr(path_start);
            while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
        }
        api_key_ = api_key_from_env();
    }

    std::string send(const std::string& request_body) override {
        httplib::Client client(base_);
        client.set_connection_timeout(cfg_.timeout_sec);
        client.set_read_timeout(cfg_.timeout_sec);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body,
                               "application/json");
        if (!res)
            throw transport_error("request to " + base_ + " failed: " +
                                  httplib::to_string(res.error()));
        if (res->status != 200)
            throw transport_error("endpoint returned HTTP " + std::to_string(res->status));
        return res->body;
    }

private:
    GenConfig cfg_;
    std::string base_;
    std::string path_prefix_;
    std::string api_key_;
};

inline std::unique_ptr<ChatTransport> make_http_transport(const GenConfig& cfg) {
    return std::make_unique<HttpChatTransport>(cfg);
}

// Transport for any endpoint string: built-in mock or HTTP.
inline std::unique_ptr<ChatTransport> make_transport(const GenConfig& cfg) {
    if (auto mock = make_offline_transport(cfg)) return mock;
    return make_http_transport(cfg);
}

}  // namespace synthcal
