#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lanekit {

using Real = double;

inline constexpr Real kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fatal pipeline failures carry the stage they happened in.
struct StageError : Error {
    int stage;
    std::string stage_name;
    StageError(int st, std::string name, const std::string& msg)
        : Error("stage " + std::to_string(st) + " (" + name + "): " + msg),
          stage(st), stage_name(std::move(name)) {}
};

// Mirror an index back into [0, n). Folds repeatedly so it also works
// when the window is wider than the image.
inline int reflect_index(int i, int n) {
    if (n <= 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

}  // namespace lanekit
