#pragma once

/**
 * @file braid.hpp
 * @brief Braid systems as explicit homogeneous linear systems.
 *
 * Classical: a symmetric bilinear vector-valued A with
 *     J(A(U,V),W) + J(A(U,W),V) = 0          for all U, V, W.
 * Generalized: a symmetric trilinear vector-valued A and a symmetric bilinear K with
 *     J(A(U,V,W),W') + J(A(U,V,W'),W) = K(U,V) J'(W,W')   for all U, V, W, W'.
 *
 * Column layout of the generalized system: the packed A coefficients first
 * (SymIndex major, output axis last), then the packed K coefficients.
 */

#include "rigidity/kernel.hpp"
#include "rigidity/multilinear.hpp"
#include "rigidity/tolerances.hpp"

namespace rigidity::braid {

LinearSystem classical_braid_system(const BilinForm& j);

/// Throws InvalidInput if J is degenerate (message names the zero-eigenvalue count) or has the wrong size.
KernelReport classical_braid_kernel(const BilinForm& j, int n, const Tolerances& tol = {});

/// Unpacked trilinear vector-valued L; constraints are symmetry in slots (0,1) and skew-symmetry in slots (1,2).
LinearSystem trilinear_symskew_system(int n);
KernelReport trilinear_symskew_kernel(int n, const Tolerances& tol = {});

/// Unknowns n*C(n+2,3) + n(n+1)/2; one row per ((U,V), (W,W')) pair of sorted basis pairs.
LinearSystem generalized_braid_system(const BilinForm& j, const BilinForm& jp, int n);

/// Joint kernel over (A, K). The report carries projections "A" and "K".
KernelReport generalized_braid_kernel(const BilinForm& j, const BilinForm& jp, int n, const Tolerances& tol = {});

/// Splits a joint unknown vector into (A, K) tensors.
struct BraidSolution {
    SymTensor a;
    SymTensor k;
};
BraidSolution split_solution(const Eigen::VectorXd& x, int n);
Eigen::VectorXd join_solution(const SymTensor& a, const SymTensor& k);

/// Max over basis quadruples of |J(A(U,V,W),W') + J(A(U,V,W'),W) - K(U,V) J'(W,W')|,
/// computed by direct tensor evaluation (independent of the row assembly).
double tresse_residual(const BilinForm& j, const BilinForm& jp, const BraidSolution& s);

/// Max over basis quadruples of the K/J' identity
///     K(U,V)J'(W,W') + K(W,W')J'(U,V) - K(U,W)J'(V,W') - K(V,W')J'(U,W).
double kj_identity_residual(const BilinForm& jp, const SymTensor& k);

} // namespace rigidity::braid
