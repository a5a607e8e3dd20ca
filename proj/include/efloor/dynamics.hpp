#pragma once

#include <string>
#include <utility>
#include <vector>

#include "efloor/absorption.hpp"
#include "efloor/tanner.hpp"

namespace efloor {

// Linearized message-passing model of one absorption set over its internal
// edges (member, even-connected check). C routes each check's signal to the
// partner edge; V sums each variable's other inputs. One iteration is
// x <- VC x plus fresh injections.
struct InternalModel {
    AbsorptionSet set;
    std::vector<std::pair<int, int>> edge_index;  // (member position, check), grouped by member
    int dim = 0;
    std::vector<int> routing;     // C as an involutive permutation of edge slots
    std::vector<double> v_op;     // V, dense row-major dim x dim
    std::vector<double> vc;       // VC, dense row-major dim x dim
    double mu_max = 0.0;
    std::vector<double> v_max;    // unit length, positive entry sum
    double approx_gain = 0.0;     // (d_v - 1) - b/a
    // Quad checks need a fixed 2-swap routing; all three pairings are tried
    // and the one maximizing mu_max kept, which is conservative for floor
    // prediction but not the decoder's true min-routing.
    bool quad_routing_heuristic = false;
    // Some member has Deg 1: its edge passes its input through unchanged.
    // Only force-built toy models reach this.
    bool degenerate_passthrough = false;
};

// Builds operators and eigen data. force skips the absorption predicate so
// toy structures can be modelled. Throws on even connection multiplicity
// above 4 and on members with no internal checks.
InternalModel build_model(const TannerGraph& g, const AbsorptionSet& s, bool force = false);

struct EigenResult {
    double mu_max = 0.0;
    std::vector<double> v_max;
    int iterations = 0;
    double residual = 0.0;
};
// Power iteration (all-ones start, identity shift against periodicity).
// Converged when |VC v - mu v|_inf <= tol * |mu|; throws after 10^4 rounds.
EigenResult dominant_eigen(const InternalModel& m, double tol = 1e-10);

double approx_gain(int a, int b, int d_v);

struct DynamicsInput {
    std::vector<double> lambda;  // intrinsic mean per member
    // lambda_ex[j][i]: extrinsic injection into member i at iteration j+1.
    // Empty means zero injections throughout.
    std::vector<std::vector<double>> lambda_ex;
    int iters = 0;
};

// beta = lambda' v_max + sum_j ((lambda_ex_j + lambda)' v_max) / mu^j with
// per-member values duplicated onto edges; failure when beta <= 0.
double failure_statistic(const InternalModel& m, const DynamicsInput& in);

// Exact recursion x_i = VC x_{i-1} + lambda + lambda_ex_i from x_0 = lambda;
// returns x_0..x_I on the edge index.
std::vector<std::vector<double>> simulate_linear_iterations(const InternalModel& m,
                                                            const DynamicsInput& in);

// Edge index, VC as sparse triplets, mu_max, v_max.
std::string model_to_json(const InternalModel& m);

}  // namespace efloor
