#ifndef PDR_CERTIFICATE_HPP
#define PDR_CERTIFICATE_HPP

#include <pdr/interval.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace pdr {

inline const char* tool_version() { return "0.1.0"; }

// Machine-readable record of one verified (or attempted) claim. "verified"
// is reserved for interval mode; float-mode runs can only claim "observed".
struct Certificate {
    std::string claim_id;
    std::string anchor;  // reproduction index into the source results
    std::map<std::string, std::string> parameters;
    std::string verdict;  // verified | observed | failed | indeterminate
    std::optional<Interval> bound;
    std::string mode = "interval";  // float | interval
    long wall_time_ms = 0;

    static Certificate make(std::string id, std::string anchor_, std::string mode_)
    {
        Certificate c;
        c.claim_id = std::move(id);
        c.anchor = std::move(anchor_);
        c.mode = std::move(mode_);
        return c;
    }

    void set_verdict(bool ok)
    {
        verdict = ok ? (mode == "interval" ? "verified" : "observed") : "failed";
    }

    bool failed() const { return verdict == "failed"; }
    bool indeterminate() const { return verdict == "indeterminate"; }
};

inline nlohmann::ordered_json interval_json(const Interval& x)
{
    return {{"lo", format_shortest(x.lo)}, {"hi", format_shortest(x.hi)}};
}

inline nlohmann::ordered_json to_json(const Certificate& c)
{
    nlohmann::ordered_json j;
    j["claim_id"] = c.claim_id;
    j["anchor"] = c.anchor;
    j["parameters"] = c.parameters;
    j["verdict"] = c.verdict;
    j["bound"] = c.bound ? interval_json(*c.bound) : nlohmann::ordered_json(nullptr);
    j["mode"] = c.mode;
    j["wall_time_ms"] = c.wall_time_ms;
    j["tool_version"] = tool_version();
    return j;
}

} // namespace pdr

#endif
