#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wocc/error.hpp"
#include "wocc/text.hpp"

namespace wocc {

/// "key = value" lines; '#' starts a comment line. Keys keep file order.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in, std::string_view what)
    {
        KeyValueFile kv;
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            const auto t = detail::trim(line);
            if (t.empty() || t.front() == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos)
                throw usage_error(std::string(what) + " line " + std::to_string(n) + ": expected 'key = value'");
            const std::string key(detail::trim(t.substr(0, eq)));
            if (key.empty()) throw usage_error(std::string(what) + " line " + std::to_string(n) + ": empty key");
            if (kv.values_.contains(key))
                throw usage_error(std::string(what) + " line " + std::to_string(n) + ": duplicate key '" + key + "'");
            kv.set(key, std::string(detail::trim(t.substr(eq + 1))));
        }
        return kv;
    }

    static KeyValueFile load(const std::filesystem::path& path, std::string_view what)
    {
        std::ifstream in(path);
        if (!in) throw usage_error("cannot read " + std::string(what) + " '" + path.string() + "'");
        return parse(in, what);
    }

    void set(const std::string& key, std::string value)
    {
        if (!values_.contains(key)) order_.push_back(key);
        values_[key] = std::move(value);
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    std::optional<std::string> get(const std::string& key) const
    {
        const auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string require(const std::string& key, std::string_view what) const
    {
        auto v = get(key);
        if (!v) throw usage_error(std::string(what) + ": missing key '" + key + "'");
        return *v;
    }

    double number(const std::string& key, double fallback) const
    {
        const auto v = get(key);
        if (!v) return fallback;
        const auto d = parse_double(*v);
        if (!d) throw usage_error("key '" + key + "': expected a number, found '" + *v + "'");
        return *d;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) const
    {
        const auto v = get(key);
        if (!v) return fallback;
        const auto d = parse_int(*v);
        if (!d) throw usage_error("key '" + key + "': expected an integer, found '" + *v + "'");
        return *d;
    }

    bool flag(const std::string& key, bool fallback) const
    {
        const auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "on" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "off" || *v == "0" || *v == "no") return false;
        throw usage_error("key '" + key + "': expected a boolean, found '" + *v + "'");
    }

    const std::vector<std::string>& keys() const { return order_; }

    void write(std::ostream& out) const
    {
        for (const auto& k : order_) out << k << " = " << values_.at(k) << '\n';
    }

private:
    std::vector<std::string> order_;
    std::map<std::string, std::string> values_;
};

} // namespace wocc
