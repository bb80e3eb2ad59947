#pragma once

// Group spec files:
//   {"type": "ggs",       "p": 3, "vector": [1, 0]}
//   {"type": "fg",        "p": 3}
//   {"type": "multi_ggs", "p": 5, "vectors": [[1,0,0,0], [0,1,0,0]]}
//   {"type": "multi_egs", "p": 5, "families": [{"j": 1, "vectors": [[1,0,0,0]]}]}
//   {"type": "sunic",     "p": 2, "poly": [1, 1]}
// Entries are reduced mod p. Errors carry the JSON pointer of the offending value.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "group_catalog.hpp"

namespace treegrp {

class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& pointer, const std::string& msg) : std::runtime_error(pointer + ": " + msg), pointer_(pointer) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct LoadedSpec {
    nlohmann::ordered_json echo;  // normalized copy of the input
    GroupInstance group;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& at) {
    if (!j.is_object()) throw SpecError(at.empty() ? "/" : at, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SpecError(at + "/" + key, "missing field");
    return *it;
}

inline long long int_at(const nlohmann::json& j, const std::string& at) {
    if (!j.is_number_integer()) throw SpecError(at, "expected an integer");
    return j.get<long long>();
}

inline DefiningVector vector_at(const nlohmann::json& j, unsigned p, const std::string& at) {
    if (!j.is_array()) throw SpecError(at, "expected an array of integers");
    if (j.size() != p - 1) throw SpecError(at, "expected " + std::to_string(p - 1) + " entries, got " + std::to_string(j.size()));
    DefiningVector v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const long long x = int_at(j[i], at + "/" + std::to_string(i));
        v.push_back(static_cast<unsigned>(((x % static_cast<long long>(p)) + p) % p));
    }
    return v;
}

inline nlohmann::ordered_json vec_json(const DefiningVector& v) {
    auto a = nlohmann::ordered_json::array();
    for (auto x : v) a.push_back(x);
    return a;
}

}  // namespace detail

inline LoadedSpec parse_spec(const nlohmann::json& j) {
    using detail::require;
    const auto& type_j = require(j, "type", "");
    if (!type_j.is_string()) throw SpecError("/type", "expected a string");
    const std::string type = type_j.get<std::string>();
    const long long pl = detail::int_at(require(j, "p", ""), "/p");
    if (pl < 2 || pl > 251) throw SpecError("/p", "expected a prime between 2 and 251");
    try {
        Prime{static_cast<unsigned>(pl)};
    } catch (const std::invalid_argument& e) {
        throw SpecError("/p", e.what());
    }
    const unsigned p = static_cast<unsigned>(pl);
    nlohmann::ordered_json echo;
    echo["type"] = type;
    echo["p"] = p;
    try {
        if (type == "fg") {
            if (p < 3) throw SpecError("/p", "the Fabrykowski-Gupta group needs p >= 3");
            return {echo, make_fg(p)};
        }
        if (type == "ggs") {
            if (p < 3) throw SpecError("/p", "GGS groups need p >= 3");
            auto v = detail::vector_at(require(j, "vector", ""), p, "/vector");
            echo["vector"] = detail::vec_json(v);
            return {echo, make_ggs(p, v)};
        }
        if (type == "multi_ggs") {
            if (p < 3) throw SpecError("/p", "multi-GGS groups need p >= 3");
            const auto& vs = require(j, "vectors", "");
            if (!vs.is_array() || vs.empty()) throw SpecError("/vectors", "expected a nonempty array");
            std::vector<DefiningVector> out;
            echo["vectors"] = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < vs.size(); ++i) {
                out.push_back(detail::vector_at(vs[i], p, "/vectors/" + std::to_string(i)));
                echo["vectors"].push_back(detail::vec_json(out.back()));
            }
            return {echo, make_multi_ggs(p, out)};
        }
        if (type == "multi_egs") {
            if (p < 3) throw SpecError("/p", "multi-EGS groups need p >= 3");
            const auto& fs = require(j, "families", "");
            if (!fs.is_array() || fs.empty()) throw SpecError("/families", "expected a nonempty array");
            MultiEGSSpec spec{p, std::vector<std::vector<DefiningVector>>(p)};
            std::map<unsigned, nlohmann::ordered_json> fam_echo;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const std::string at = "/families/" + std::to_string(i);
                const long long jj = detail::int_at(require(fs[i], "j", at), at + "/j");
                if (jj < 1 || jj > static_cast<long long>(p)) throw SpecError(at + "/j", "expected 1 <= j <= p");
                const auto& vs = require(fs[i], "vectors", at);
                if (!vs.is_array()) throw SpecError(at + "/vectors", "expected an array");
                for (std::size_t k = 0; k < vs.size(); ++k) {
                    auto v = detail::vector_at(vs[k], p, at + "/vectors/" + std::to_string(k));
                    spec.families[static_cast<std::size_t>(jj - 1)].push_back(v);
                    fam_echo[static_cast<unsigned>(jj)].push_back(detail::vec_json(v));
                }
            }
            echo["families"] = nlohmann::ordered_json::array();
            for (auto& [jj, vs] : fam_echo) echo["families"].push_back({{"j", jj}, {"vectors", vs}});
            return {echo, make_multi_egs(spec)};
        }
        if (type == "sunic") {
            const auto& poly = require(j, "poly", "");
            if (!poly.is_array() || poly.empty()) throw SpecError("/poly", "expected a nonempty array");
            std::vector<unsigned> c;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const long long x = detail::int_at(poly[i], "/poly/" + std::to_string(i));
                c.push_back(static_cast<unsigned>(((x % pl) + pl) % pl));
            }
            echo["poly"] = c;
            return {echo, make_sunic(p, c)};
        }
    } catch (const std::invalid_argument& e) {
        throw SpecError("/", e.what());
    }
    throw SpecError("/type", "unknown group type '" + type + "'");
}

inline const std::map<std::string, std::string>& preset_sources() {
    static const std::map<std::string, std::string> m{
        {"fg3", R"({"type": "fg", "p": 3})"},
        {"fg5", R"({"type": "fg", "p": 5})"},
        {"gs3", R"({"type": "ggs", "p": 3, "vector": [1, -1]})"},
        {"sunic-grigorchuk", R"({"type": "sunic", "p": 2, "poly": [1, 1]})"},
        {"remark-group", R"({"type": "multi_egs", "p": 5, "families": [{"j": 1, "vectors": [[1, 0, 0, 0]]}, {"j": 5, "vectors": [[1, 1, 0, 0]]}]})"},
        {"appb-p5", R"({"type": "multi_egs", "p": 5, "families": [{"j": 1, "vectors": [[0, 1, 1, 0]]}, {"j": 2, "vectors": [[0, 1, 1, 0]]}]})"},
    };
    return m;
}

inline LoadedSpec load_preset(const std::string& name) {
    auto it = preset_sources().find(name);
    if (it == preset_sources().end()) throw SpecError("", "unknown preset '" + name + "'");
    return parse_spec(nlohmann::json::parse(it->second));
}

inline LoadedSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("", "cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_spec(j);
}

}  // namespace treegrp
