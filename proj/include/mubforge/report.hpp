#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mubforge {

/// Result of a verification sweep: one PASS/FAIL line per checked claim
/// plus machine-readable "# key=value" summary lines.
class Report {
public:
    explicit Report(std::string title) : title_(std::move(title)) {}

    void check(const std::string& label, bool ok) {
        checks_.emplace_back(label, ok);
    }

    void fact(const std::string& key, const std::string& value) {
        facts_.emplace_back(key, value);
    }

    template <class T>
    void fact(const std::string& key, const T& value) {
        std::ostringstream os;
        os << value;
        facts_.emplace_back(key, os.str());
    }

    bool passed() const {
        for (const auto& [label, ok] : checks_) {
            if (!ok) return false;
        }
        return true;
    }

    const std::string& title() const { return title_; }
    const std::vector<std::pair<std::string, bool>>& checks() const { return checks_; }
    const std::vector<std::pair<std::string, std::string>>& facts() const { return facts_; }

    std::string to_text() const {
        std::ostringstream os;
        os << "# report=" << title_ << "\n";
        for (const auto& [key, value] : facts_) {
            os << "# " << key << "=" << value << "\n";
        }
        for (const auto& [label, ok] : checks_) {
            os << (ok ? "PASS " : "FAIL ") << label << "\n";
        }
        return os.str();
    }

private:
    std::string title_;
    std::vector<std::pair<std::string, bool>> checks_;
    std::vector<std::pair<std::string, std::string>> facts_;
};

}  // namespace mubforge
