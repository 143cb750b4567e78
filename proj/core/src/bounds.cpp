// SPDX-License-Identifier: Apache-2.0
#include "isacest/bounds.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace isacest {

RMat fisher_information(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
                        const SamplingAxes& axes, double noise_var) {
    if (!(noise_var > 0.0)) throw ConfigError("noise_var must be positive");
    const CMat jac = jacobian(paths, x_hat, mask, axes);
    RMat fim = (2.0 / noise_var) * (jac.adjoint() * jac).real();
    return 0.5 * (fim + fim.transpose());
}

namespace {

// Inverse of a symmetric positive definite matrix after Jacobi scaling.
// Returns the inverse and the condition number of the scaled matrix.
std::pair<RMat, double> scaled_inverse(const RMat& fim) {
    const auto n = fim.rows();
    RVec scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(fim(i, i) > 0.0)) {
            throw SingularityError("Fisher information has no information on parameter " + std::to_string(i));
        }
        scale[i] = 1.0 / std::sqrt(fim(i, i));
    }
    const RMat scaled = scale.asDiagonal() * fim * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> eig(scaled);
    const RVec values = eig.eigenvalues();
    const double largest = values.maxCoeff();
    const double smallest = values.minCoeff();
    if (!(smallest > largest * 1e-12)) {
        throw SingularityError("Fisher information is singular (scaled eigenvalues " + std::to_string(smallest) +
                               " .. " + std::to_string(largest) + ")");
    }
    const RMat scaled_inv = eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    return {scale.asDiagonal() * scaled_inv * scale.asDiagonal(), largest / smallest};
}

}  // namespace

CrbResult crb_from_fim(const RMat& fim, int n_paths) {
    if (fim.rows() != fim.cols() || fim.rows() != 4 * n_paths) {
        throw DimensionError("Fisher information must be 4P x 4P");
    }
    auto [inverse, cond] = scaled_inverse(fim);
    return CrbResult{inverse.diagonal(), cond, n_paths};
}

CrbResult crb(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask, const SamplingAxes& axes,
              double noise_var) {
    return crb_from_fim(fisher_information(paths, x_hat, mask, axes, noise_var), paths.size());
}

RVec crb_subset(const RMat& fim, std::span<const int> indices) {
    const auto n = static_cast<Eigen::Index>(indices.size());
    RMat sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = fim(indices[i], indices[j]);
    }
    return scaled_inverse(sub).first.diagonal();
}

}  // namespace isacest
