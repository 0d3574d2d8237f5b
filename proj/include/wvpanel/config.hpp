#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "wvpanel/errors.hpp"
#include "wvpanel/rng.hpp"

namespace wvpanel {

// Raised for malformed configuration (bad key syntax, unparsable value);
// the CLI maps it to the usage exit code.
struct ConfigError : Error {
    using Error::Error;
};

// Plain-text key=value configuration: one key per line, '#' comments,
// whitespace around keys and values trimmed. Later assignments override
// earlier ones, which implements the flag-over-file precedence.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig cfg;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view line = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
            }
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
            }
            cfg.entries_[key] = value;
        }
        return cfg;
    }

    void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, std::string fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end() || it->second.empty()) {
            throw ConfigError("config key '" + key + "': required but not set");
        }
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        double v = 0.0;
        const char* first = it->second.data();
        const char* last = first + it->second.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            throw ConfigError("config key '" + key + "': '" + it->second + "' is not a number");
        }
        return v;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::uint64_t v = 0;
        const char* first = it->second.data();
        const char* last = first + it->second.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            throw ConfigError("config key '" + key + "': '" + it->second +
                              "' is not a non-negative integer");
        }
        return v;
    }

    std::size_t get_size(const std::string& key, std::size_t fallback) const {
        return static_cast<std::size_t>(get_u64(key, fallback));
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config key '" + key + "': '" + it->second + "' is not a boolean");
    }

    // Entries whose key starts with the prefix, prefix stripped. Sorted by
    // key (std::map order), so iteration is deterministic.
    std::map<std::string, std::string> with_prefix(const std::string& prefix) const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : entries_) {
            if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // Sorted key=value serialization; hashing this pins the resolved
    // configuration in the run manifest.
    std::string canonical_string() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += k;
            out += '=';
            out += v;
            out += '\n';
        }
        return out;
    }

    std::uint64_t hash() const { return fnv1a64(canonical_string()); }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
            s.remove_suffix(1);
        }
        return s;
    }

    std::map<std::string, std::string> entries_;
};

// Per-stage seed derivation: every subcommand draws its randomness from
// derive_seed(master, stage name), so stages never share streams.
inline std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
    return derive_seed(master, stage);
}

}  // namespace wvpanel
