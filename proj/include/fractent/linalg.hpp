#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fractent {

using cdouble = std::complex<double>;

// Dense Hermitian matrix, row-major. Writes go through set(), which
// mirrors the conjugate entry, so Hermiticity holds by construction.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

    int dim() const { return dim_; }

    cdouble entry(int i, int j) const { return a_[idx(i, j)]; }

    void set(int i, int j, cdouble v) {
        if (i == j) {
            a_[idx(i, i)] = cdouble(v.real(), 0.0);
        } else {
            a_[idx(i, j)] = v;
            a_[idx(j, i)] = std::conj(v);
        }
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += a_[idx(i, i)].real();
        return t;
    }

    const std::vector<cdouble>& data() const { return a_; }
    std::vector<cdouble>& data() { return a_; }

  private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * dim_ + j;
    }

    int dim_ = 0;
    std::vector<cdouble> a_;
};

// All eigenvalues of a real symmetric matrix (row-major, destroyed in
// place), ascending, by cyclic Jacobi rotations. Converged when the
// off-diagonal Frobenius norm drops below tol_rel * ||A||_F. Throws
// NumericalError after max_sweeps.
std::vector<double> jacobi_eigenvalues(std::vector<double>& a, int dim,
                                       double tol_rel = 1e-13, int max_sweeps = 50);

// All eigenvalues of a Hermitian matrix, ascending. H = X + iY is
// embedded as the real symmetric [[X, -Y], [Y, X]] of doubled dimension
// (each eigenvalue appears twice) and handed to the real Jacobi kernel.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h,
                                          double tol_rel = 1e-13, int max_sweeps = 50);

}  // namespace fractent
