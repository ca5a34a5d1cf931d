#pragma once

#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"

namespace attdet {

enum class SolveMode { unified, vector_only, handeye_only };

const char* to_string(SolveMode mode);

/// The unconstrained least-squares estimate x = vec(R~) together with the
/// normal matrix H + (Q (x) I)(Q^T (x) I), its numerical rank, the objective
/// value at x and observability diagnostics. rank < n^2 marks directions of
/// the attitude that the data cannot resolve; the minimum-norm solution is
/// still returned.
struct AttitudeSolution {
    Vec x;
    Mat normal_matrix;
    int rank = 0;
    double loss = 0.0;
    SolveMode mode = SolveMode::unified;
    bool degenerate = false;  // normal matrix rank-deficient
    bool ambiguous = false;   // hand-eye-only minimal eigenspace not unique
};

/// Closed-form solution of the combined problem:
///   x = [H + (Q (x) I)(Q^T (x) I)]^+ (Q (x) I) vec(P).
/// Requires N >= 1.
AttitudeSolution solve_unified(const MeasurementSet& ms);

/// Vector-observation specialization (H omitted). Requires N >= 1.
AttitudeSolution solve_vector_only(const MeasurementSet& ms);

/// Hand-eye-only eigen-solution: x is the eigenvector of H at its smallest
/// eigenvalue, rescaled to Frobenius norm sqrt(n) and sign-disambiguated
/// (det > 0 for odd n, smaller loss otherwise). Requires M >= 1. Sets the
/// ambiguity flag when the two smallest eigenvalues of H are closer than
/// 1e-12 * ||H||.
AttitudeSolution solve_handeye_only(const MeasurementSet& ms);

/// Objective value
///   x^T [H + (Q (x) I)(Q^T (x) I)] x - 2 vec(P)^T (Q^T (x) I) x
///     + vec(P)^T vec(P),
/// clamped to be nonnegative. With M = 0 this equals
/// sum_i w_i ||b_i - R~ r_i||^2.
double evaluate_loss(const MeasurementSet& ms, const Vec& x);

}  // namespace attdet
