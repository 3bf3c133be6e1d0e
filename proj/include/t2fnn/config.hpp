#pragma once

// Plain-text experiment manifests: one `dotted.key = value` per line, `#`
// starts a comment. Absent keys take documented defaults; unknown keys are
// rejected. The same format carries network checkpoints.

#include "t2fnn/harness.hpp"
#include "t2fnn/network.hpp"

#include <map>
#include <string>
#include <string_view>

namespace t2fnn {

/// Ordered key -> (value, line) map of a parsed document.
struct KeyValueDocument {
    struct Entry {
        std::string value;
        std::size_t line;
    };
    std::map<std::string, Entry> entries;
};

/// Throws ParseError on malformed lines or duplicate keys.
KeyValueDocument parse_key_values(std::string_view text);

/// Throws ParseError (bad value / unknown key) or ValidationError.
ExperimentConfig parse_config(std::string_view text);
/// Applies a single `key = value` override on top of an existing config.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                        std::size_t line = 0);
std::string serialize_config(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path);

std::string serialize_network(const NetworkState& net);
NetworkState parse_network(std::string_view text);

} // namespace t2fnn
