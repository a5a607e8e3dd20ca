#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "efloor/simulator.hpp"
#include "efloor/tanner.hpp"

namespace efloor::testsupport {

// (d_v, d_c) array code: d_v x d_c blocks of p x p circulants, block (i,j)
// shifted by i*j mod p; 4-cycle free for prime p >= d_c.
TannerGraph array_code(int p, int d_v = 3, int d_c = 6);

// Seeded random (3,6)-regular 4-cycle-free code via progressive edge growth
// with restart on dead ends. n_vars must be a multiple of 2.
TannerGraph random_regular_code(int n_vars, std::uint64_t seed);

// The 20 pairwise connections of the (8,8) all-deg-5 topology used across
// fixtures: vertices 0..7, every vertex has degree 5.
const std::vector<std::pair<int, int>>& deg5_octet_edges();

// Minimal host embedding that topology: 8 member variables of degree 6,
// 20 degree-2 internal checks, 8 degree-1 external checks. Members are 0..7.
TannerGraph octet_host();

struct PlantedCode {
    TannerGraph g;
    std::vector<int> members;  // the planted (8,8) set, sorted
};

// Array code with the octet grafted on: members n0..n0+7 (degree 6), one
// degree-4 external check per member filled out with array-code variables.
// Decodable end to end, so the planted set actually locks and the stable
// failure support is exactly the member set. A low rate host (small d_c)
// keeps host noise survivable at the sigma where the planted set starts to
// capture frames. Requires p >= 12.
PlantedCode planted_code(int p, int d_v = 3, int d_c = 6);

// Composite-Simpson evaluation of the same integral phi uses, on a uniform
// grid; independent of the Gauss-Legendre implementation.
double phi_simpson(double m, int intervals = 40000);

// Mean recursion rebuilt from phi_simpson and plain bisection. Usable while
// the means stay within double range of e^{-m/4} (roughly m < 2800).
std::vector<double> de_reference(int d_v, int d_c, double m_lambda, int iters);

// Plain map-based flooding BP with the same schedule as Decoder: var-to-check
// from the previous round's check messages, check-to-var, then decisions and
// the zero-syndrome test.
DecodeOutcome reference_decode(const TannerGraph& g,
                               const std::vector<double>& llr, int max_iters,
                               bool min_sum = false, double llr_clip = 50.0);

}  // namespace efloor::testsupport
