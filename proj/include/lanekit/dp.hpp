#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "common.hpp"

namespace lanekit {

// Minimal-energy path through a stage/state lattice. points holds one
// (axis-coordinate, row) pair per stage in stage order; steps records the
// chosen transition offsets for tests.
struct DpPath {
    std::vector<std::pair<int, int>> points;
    std::vector<int> steps;
    Real energy = 0;
    bool has_evidence = true;  // false when every data cell was zero
};

namespace detail {

// Stage-by-stage minimisation. data(stage, state) is added at each cell;
// offsets (in tie-break preference order) give the predecessor state of the
// previous stage as state + offset, costing penalty(offset). Returns the
// state sequence of the optimal path; ties at the terminal stage pick the
// smallest state.
template <typename DataFn, typename PenFn>
std::pair<std::vector<int>, Real> dp_min_path(int stages, int states,
                                              DataFn&& data,
                                              const std::vector<int>& offsets,
                                              PenFn&& penalty,
                                              std::vector<int>* steps_out = nullptr) {
    if (stages <= 0 || states <= 0) throw Error("dp_min_path: empty lattice");
    constexpr Real kInf = std::numeric_limits<Real>::infinity();
    std::vector<Real> prev(states), cur(states);
    std::vector<int8_t> choice(static_cast<size_t>(stages) * states, 0);

    for (int s = 0; s < states; ++s) prev[s] = data(0, s);
    for (int stage = 1; stage < stages; ++stage) {
        for (int s = 0; s < states; ++s) {
            Real best = kInf;
            int best_off = 0;
            for (size_t oi = 0; oi < offsets.size(); ++oi) {
                const int ps = s + offsets[oi];
                if (ps < 0 || ps >= states) continue;
                const Real e = prev[ps] + penalty(offsets[oi]);
                if (e < best) {
                    best = e;
                    best_off = offsets[oi];
                }
            }
            cur[s] = best + data(stage, s);
            choice[static_cast<size_t>(stage) * states + s] = static_cast<int8_t>(best_off);
        }
        prev.swap(cur);
    }

    int term = 0;
    for (int s = 1; s < states; ++s)
        if (prev[s] < prev[term]) term = s;

    std::vector<int> path(stages);
    path[stages - 1] = term;
    if (steps_out) steps_out->assign(stages > 1 ? stages - 1 : 0, 0);
    for (int stage = stages - 1; stage > 0; --stage) {
        const int off = choice[static_cast<size_t>(stage) * states + path[stage]];
        path[stage - 1] = path[stage] + off;
        if (steps_out) (*steps_out)[stage - 1] = off;
    }
    return {std::move(path), prev[term]};
}

}  // namespace detail

}  // namespace lanekit
