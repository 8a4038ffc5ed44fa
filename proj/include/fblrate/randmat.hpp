#pragma once

// Random-matrix primitives for the Monte Carlo estimators.
//
// Every sampler has two forms: one drawing from a caller-owned RandomSource
// (for tight loops) and one taking an RngStream by value, which is a pure
// function of that stream.

#include "fblrate/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fblrate {

using ComplexMatrix = Eigen::MatrixXcd;

/// Singular values in descending order; values below 1e-12·σ₁ are clamped to 0.
struct SingularSpectrum {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
};

/// rows×cols matrix of i.i.d. CN(0,1) entries (real and imaginary parts each of variance 1/2).
ComplexMatrix sample_cn_matrix(int rows, int cols, RandomSource& source);
ComplexMatrix sample_cn_matrix(int rows, int cols, RngStream stream);

/// ln det(H Hᴴ) for H of size n_t×n_r with CN(0,1) entries; requires n_r >= n_t >= 1.
double wishart_logdet(int n_t, int n_r, RandomSource& source);
double wishart_logdet(int n_t, int n_r, RngStream stream);

/// Largest eigenvalue of Qᴴ Q for a rows×cols CN(0,1) matrix Q.
double lambda1(int rows, int cols, RandomSource& source);
double lambda1(int rows, int cols, RngStream stream);

/// Y = X H + W with fresh H (n_t×n_r) and W (T×n_r); X is T×n_t.
ComplexMatrix channel_output(const ComplexMatrix& x, int n_r, RandomSource& source);
ComplexMatrix channel_output(const ComplexMatrix& x, int n_r, RngStream stream);

SingularSpectrum singular_values(const ComplexMatrix& m);

/// ln det of a Hermitian positive-definite matrix via Cholesky.
double log_det_hpd(const ComplexMatrix& gram);

/// Eigenvalues of the smaller Gram matrix of m (m mᴴ or mᴴ m), ascending.
Eigen::VectorXd gram_eigenvalues(const ComplexMatrix& m);

} // namespace fblrate
