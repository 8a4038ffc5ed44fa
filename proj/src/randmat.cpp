#include "fblrate/randmat.hpp"

#include "fblrate/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fblrate {

namespace {

constexpr double kSingularClamp = 1e-12;

void require_shape(int rows, int cols, const char* what)
{
    if (rows < 1 || cols < 1) {
        throw DimensionError(std::string(what) + ": dimensions must be >= 1, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

} // namespace

ComplexMatrix sample_cn_matrix(int rows, int cols, RandomSource& source)
{
    require_shape(rows, cols, "sample_cn_matrix");
    constexpr double scale = 1.0 / std::numbers::sqrt2;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double re = source.normal();
            const double im = source.normal();
            m(i, j) = {scale * re, scale * im};
        }
    }
    return m;
}

ComplexMatrix sample_cn_matrix(int rows, int cols, RngStream stream)
{
    RandomSource source(stream);
    return sample_cn_matrix(rows, cols, source);
}

double log_det_hpd(const ComplexMatrix& gram)
{
    Eigen::LLT<ComplexMatrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw DegenerateSpectrumError("log_det_hpd: matrix is not positive definite");
    }
    double sum = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        sum += std::log(l(i, i).real());
    }
    return 2.0 * sum;
}

double wishart_logdet(int n_t, int n_r, RandomSource& source)
{
    if (n_t < 1 || n_r < n_t) {
        throw DimensionError("wishart_logdet: need n_r >= n_t >= 1, got n_t=" + std::to_string(n_t) +
                             ", n_r=" + std::to_string(n_r));
    }
    const ComplexMatrix h = sample_cn_matrix(n_t, n_r, source);
    const ComplexMatrix gram = h * h.adjoint();
    return log_det_hpd(gram);
}

double wishart_logdet(int n_t, int n_r, RngStream stream)
{
    RandomSource source(stream);
    return wishart_logdet(n_t, n_r, source);
}

Eigen::VectorXd gram_eigenvalues(const ComplexMatrix& m)
{
    const ComplexMatrix gram = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint())
                                                    : ComplexMatrix(m.adjoint() * m);
    if (gram.rows() == 1) {
        return Eigen::VectorXd::Constant(1, gram(0, 0).real());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
    Eigen::VectorXd values = solver.eigenvalues();
    for (auto& v : values) {
        v = v > 0.0 ? v : 0.0;
    }
    return values;
}

double lambda1(int rows, int cols, RandomSource& source)
{
    require_shape(rows, cols, "lambda1");
    const ComplexMatrix q = sample_cn_matrix(rows, cols, source);
    return gram_eigenvalues(q).maxCoeff();
}

double lambda1(int rows, int cols, RngStream stream)
{
    RandomSource source(stream);
    return lambda1(rows, cols, source);
}

ComplexMatrix channel_output(const ComplexMatrix& x, int n_r, RandomSource& source)
{
    if (x.rows() < 1 || x.cols() < 1 || n_r < 1) {
        throw DimensionError("channel_output: X must be T x n_t with T, n_t >= 1 and n_r >= 1");
    }
    const auto n_t = static_cast<int>(x.cols());
    const auto t = static_cast<int>(x.rows());
    const ComplexMatrix h = sample_cn_matrix(n_t, n_r, source);
    const ComplexMatrix w = sample_cn_matrix(t, n_r, source);
    return x * h + w;
}

ComplexMatrix channel_output(const ComplexMatrix& x, int n_r, RngStream stream)
{
    RandomSource source(stream);
    return channel_output(x, n_r, source);
}

SingularSpectrum singular_values(const ComplexMatrix& m)
{
    SingularSpectrum out;
    if (m.size() == 0) {
        return out;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    out.values.assign(s.data(), s.data() + s.size());
    const double floor = out.values.front() * kSingularClamp;
    for (auto& v : out.values) {
        if (v < floor) {
            v = 0.0;
        }
    }
    return out;
}

} // namespace fblrate
