#pragma once

#include <vector>

#include "multiboson/common.hpp"
#include "multiboson/spectra.hpp"

namespace multiboson {

enum class ComputationPath { General, Distinguishable, Identical, MixedGroups, FockOracle };

const char* to_string(ComputationPath path);

struct DetectionProbability {
    /// Collision-normalized detection probability: raw_rate / prod_d n_d!.
    double value;
    /// Permutation-weighted permanent sum before collision normalization.
    double raw_rate;
    /// Magnitude of the accumulated imaginary part that analytically cancels;
    /// a direct measure of roundoff in the permanent sum.
    double imaginary_residual;
    ComputationPath path;
};

/// Full partial-distinguishability rate
///
///   raw = sum_rho f_rho * perm A_rho,   f_rho = prod_s g(s, rho(s)),
///   A_rho[d][s] = conj(u_sub[d][s]) * u_sub[d][rho(s)]
///
/// summed over all N! permutations of the input photons. rho and its inverse
/// contribute conjugate terms, so only one of each pair is evaluated and
/// doubled; self-inverse permutations are added once and their imaginary
/// parts feed imaginary_residual. Permutations with f_rho exactly zero are
/// skipped before the permanent is touched.
///
/// u_sub is the N x N scattering submatrix (see submatrix()); rows of equal
/// output ports must be adjacent, and output_occupations lists the occupation
/// of each distinct detected port in row order. Guarded at N <= 10: the cost
/// grows as N! * 2^N * N.
DetectionProbability probability_general(const MatrixXcd& u_sub, const GramMatrix& gram,
                                         const std::vector<int>& output_occupations);

/// Fully distinguishable photons (diagonal Gram): raw = perm |u_sub|^2.
DetectionProbability probability_distinguishable(const MatrixXcd& u_sub,
                                                 const std::vector<int>& output_occupations);

/// Fully indistinguishable photons (all-ones Gram): raw = |perm u_sub|^2.
DetectionProbability probability_identical(const MatrixXcd& u_sub,
                                           const std::vector<int>& output_occupations);

/// One mutually identical group against an otherwise fully distinguishable
/// background (block Gram). identical_columns lists the u_sub column indices
/// of the group, strictly increasing; the complement is the distinguishable
/// set. With n_d the detected occupations and k_d the share assigned to the
/// group,
///
///   raw = sum over distinct output sub-multisets Theta (k_d <= n_d,
///         sum k_d = |group|) of
///         prod_d C(n_d, k_d) * perm |u_sub|^2 (rest, complement)
///                            * |perm u_sub (Theta, group)|^2
///
/// Empty group reduces to the distinguishable path; full group to the
/// identical path.
DetectionProbability probability_mixed_groups(const MatrixXcd& u_sub,
                                              const std::vector<int>& output_occupations,
                                              const std::vector<int>& identical_columns);

}  // namespace multiboson
