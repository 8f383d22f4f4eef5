#pragma once

#include "isonorm/body.hpp"
#include "isonorm/estimate.hpp"

#include <cstdint>
#include <vector>

namespace isonorm {

struct MilmanPajorReport {
    Estimate lhs;    // (1/vol C) integral of ||x||_K over C
    double rhs = 0.0; // (n/(n+1)) (vol C / vol K)^{1/n}
    double rhs_se = 0.0;
    bool floor_ok = false;     // lhs >= rhs - 3 SE(lhs) - 3 SE(rhs)
    double gap_se_units = 0.0; // signed (lhs - rhs) / combined SE
};

/// Reverse bound with its explicit n/(n+1) constant.
MilmanPajorReport milman_pajor_check(const Body& c, const Body& k, RngKey stream,
                                     std::int64_t count);

struct PositionSearchReport {
    Mat t_star;            // det = 1 (renormalized)
    Estimate objective;    // fresh-stream estimate of F(T*)
    double crn_objective = 0.0; // deterministic value on the search batch
    double ratio = 0.0;    // objective / (vol C / vol K)^{1/n}
    double det_t = 0.0;
    bool converged = false;
    int winner_restart = -1;
    std::vector<double> trace; // winning restart: best objective per iteration
};

/// Derivative-free search for T in SL(n) minimizing the mean K-gauge of
/// T^{-1}-mapped uniform points of C: T = exp(S) with S traceless, simplex
/// iterations on a common-random-number batch, `restarts` starts sharing
/// `budget` objective evaluations.
PositionSearchReport optimize_position(const Body& c, const Body& k, RngKey stream,
                                       std::int64_t budget = 1600, int restarts = 8,
                                       std::int64_t crn_batch = 10000);

} // namespace isonorm
