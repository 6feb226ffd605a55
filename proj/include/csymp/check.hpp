#ifndef CSYMP_CHECK_HPP
#define CSYMP_CHECK_HPP

#include <string>
#include <vector>

namespace csymp {

enum class CheckStatus { Pass, Fail, Skip };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Skip: return "skip";
    }
    return "?";
}

/// One measured identity with the anchor naming the claim it certifies.
struct CheckReport {
    std::string name;
    std::string anchor;
    CheckStatus status = CheckStatus::Fail;
    double measured = 0.0;
    double tolerance = 0.0;

    bool passed() const { return status != CheckStatus::Fail; }

    static CheckReport make(std::string name, std::string anchor, double measured,
                            double tolerance) {
        CheckReport r;
        r.name = std::move(name);
        r.anchor = std::move(anchor);
        r.measured = measured;
        r.tolerance = tolerance;
        r.status = measured <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        return r;
    }
    static CheckReport make_bool(std::string name, std::string anchor, bool ok) {
        CheckReport r;
        r.name = std::move(name);
        r.anchor = std::move(anchor);
        r.measured = ok ? 0.0 : 1.0;
        r.tolerance = 0.0;
        r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        return r;
    }
    static CheckReport skip(std::string name, std::string anchor, double measured) {
        CheckReport r;
        r.name = std::move(name);
        r.anchor = std::move(anchor);
        r.measured = measured;
        r.status = CheckStatus::Skip;
        return r;
    }
};

inline bool all_passed(const std::vector<CheckReport>& checks) {
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail) return false;
    return true;
}

}  // namespace csymp

#endif  // CSYMP_CHECK_HPP
