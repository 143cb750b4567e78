// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/channel.hpp"
#include "isacest/grid.hpp"
#include "isacest/model.hpp"
#include "isacest/types.hpp"

#include <span>

namespace isacest {

/// FIM = (2 / noise_var) Re(J^H J) in the Jacobian parameter order
/// (tau_1..tau_P, alpha_1..alpha_P, Re gamma_1..Re gamma_P, Im gamma_1..Im gamma_P).
RMat fisher_information(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
                        const SamplingAxes& axes, double noise_var);

struct CrbResult {
    /// Diagonal of the inverse FIM, same order as the FIM.
    RVec variances;
    /// Condition number of the Jacobi-scaled FIM.
    double condition_number = 0.0;
    int n_paths = 0;

    double tau(int p) const { return variances[p]; }
    double alpha(int p) const { return variances[n_paths + p]; }
    double gamma_re(int p) const { return variances[2 * n_paths + p]; }
    double gamma_im(int p) const { return variances[3 * n_paths + p]; }
};

/// Conditional (given x_hat) Cramer-Rao bound.
/// Throws SingularityError when the FIM is numerically singular.
CrbResult crb(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
              const SamplingAxes& axes, double noise_var);

/// Bound on the parameters in `indices` when all other parameters are known:
/// diagonal of inv(FIM[indices, indices]), in the order of `indices`.
RVec crb_subset(const RMat& fim, std::span<const int> indices);

/// Full inverse with the same rank checks as crb().
CrbResult crb_from_fim(const RMat& fim, int n_paths);

}  // namespace isacest
