#include "hldx/config.hpp"

#include <fstream>
#include <sstream>

#include "hldx/errors.hpp"
#include "json.hpp"

namespace hldx {

void PipelineConfig::validate() const {
    if (max_tokens_per_segment < 16) {
        throw Error(ErrorCode::InvalidConfig, "max_tokens_per_segment must be >= 16");
    }
    if (top_n < 1) {
        throw Error(ErrorCode::InvalidConfig, "top_n must be >= 1");
    }
    if (shot_count < 0 || shot_count > 3) {
        throw Error(ErrorCode::InvalidConfig, "shots must be in [0, 3]");
    }
    if (parallelism < 1) {
        throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
    }
    if (max_output_tokens < 1) {
        throw Error(ErrorCode::InvalidConfig, "max_output_tokens must be >= 1");
    }
    if (naive_context_tokens < 16) {
        throw Error(ErrorCode::InvalidConfig, "naive_context_tokens must be >= 16");
    }
    if (backend != "scripted" && backend != "replay" && backend != "http") {
        throw Error(ErrorCode::InvalidConfig, "unknown backend: " + backend);
    }
    if (levels.empty()) {
        throw Error(ErrorCode::InvalidConfig, "levels must be non-empty");
    }
    for (size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 0) {
            throw Error(ErrorCode::InvalidConfig, "levels must be >= 0");
        }
        if (i > 0 && levels[i] <= levels[i - 1]) {
            throw Error(ErrorCode::InvalidConfig, "levels must be strictly increasing");
        }
    }
}

PipelineConfig apply_config_json(const PipelineConfig& base, std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    }

    PipelineConfig cfg = base;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "format") {
                auto f = format_from_name(value.get<std::string>());
                if (!f) throw Error(ErrorCode::InvalidConfig, "unknown format: " + value.get<std::string>());
                cfg.format = *f;
            } else if (key == "max_tokens_per_segment") {
                cfg.max_tokens_per_segment = value.get<int>();
            } else if (key == "top_n") {
                cfg.top_n = value.get<int>();
            } else if (key == "strategy") {
                auto s = strategy_from_name(value.get<std::string>());
                if (!s) throw Error(ErrorCode::InvalidConfig, "unknown strategy: " + value.get<std::string>());
                cfg.strategy = *s;
            } else if (key == "order_by_similarity") {
                cfg.order_by_similarity = value.get<bool>();
            } else if (key == "variant") {
                auto v = variant_from_name(value.get<std::string>());
                if (!v) throw Error(ErrorCode::InvalidConfig, "unknown variant: " + value.get<std::string>());
                cfg.variant = *v;
            } else if (key == "mode") {
                auto m = mode_from_name(value.get<std::string>());
                if (!m) throw Error(ErrorCode::InvalidConfig, "unknown mode: " + value.get<std::string>());
                cfg.mode = *m;
            } else if (key == "shots") {
                cfg.shot_count = value.get<int>();
            } else if (key == "parallelism") {
                cfg.parallelism = value.get<int>();
            } else if (key == "max_output_tokens") {
                cfg.max_output_tokens = value.get<int>();
            } else if (key == "naive_context_tokens") {
                cfg.naive_context_tokens = value.get<int>();
            } else if (key == "backend") {
                cfg.backend = value.get<std::string>();
            } else if (key == "fixtures") {
                cfg.fixture_path = value.get<std::string>();
            } else if (key == "cache") {
                cfg.cache_path = value.get<std::string>();
            } else if (key == "templates") {
                cfg.template_dir = value.get<std::string>();
            } else if (key == "record") {
                cfg.record_path = value.get<std::string>();
            } else if (key == "embedder_url") {
                cfg.embedder_url = value.get<std::string>();
            } else if (key == "embedder_key") {
                cfg.embedder_key = value.get<std::string>();
            } else if (key == "levels") {
                cfg.levels = value.get<std::vector<double>>();
            } else {
                throw Error(ErrorCode::InvalidConfig, "unknown config key: " + key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::StorageError, "cannot read config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return apply_config_json(base, ss.str());
}

} // namespace hldx
