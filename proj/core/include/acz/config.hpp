#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace acz {

/// Flat key=value configuration. Lines are trimmed, '#' starts a comment,
/// a repeated key overrides the earlier value.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated doubles, e.g. "1e-4,1e-3".
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           const std::vector<std::int64_t>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    /// The resolved configuration, one key=value per line in key order.
    /// Embedded in every emitted report.
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace acz
