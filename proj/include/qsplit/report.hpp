// Residual reports shared by the checkers. Keys are kept sorted so that
// serialized output is stable.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace qsplit {

struct LevelReport {
    int k = 0;
    std::map<std::string, double> residuals;
    bool pass = true;
};

struct CheckReport {
    std::vector<LevelReport> levels;
    std::vector<std::string> notes;
    bool pass = true;
    int witness = -1;  // first level from which every later level passes

    LevelReport& level(int k) {
        for (auto& l : levels)
            if (l.k == k) return l;
        levels.push_back(LevelReport{k, {}, true});
        return levels.back();
    }

    void add(int k, const std::string& name, double value, double threshold) {
        LevelReport& l = level(k);
        l.residuals[name] = value;
        if (!(value <= threshold)) l.pass = false;
    }

    // Recompute pass/witness from the per-level flags.
    void finalize() {
        std::sort(levels.begin(), levels.end(), [](const LevelReport& a, const LevelReport& b) { return a.k < b.k; });
        pass = true;
        witness = -1;
        for (const auto& l : levels) pass = pass && l.pass;
        for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
            if (!it->pass) break;
            witness = it->k;
        }
    }

    double max_residual(const std::string& name) const {
        double m = 0.0;
        for (const auto& l : levels) {
            auto it = l.residuals.find(name);
            if (it != l.residuals.end() && it->second > m) m = it->second;
        }
        return m;
    }
};

}  // namespace qsplit
