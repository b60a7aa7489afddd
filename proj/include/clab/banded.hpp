#pragma once

#include <span>
#include <vector>

namespace clab {

/// General banded matrix in LAPACK-style band storage with room for the
/// fill-in rows produced by partially pivoted elimination.
class BandedMatrix {
public:
    BandedMatrix(int n, int lower, int upper);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    /// Accesses entry (i, j); valid for i - j in [-(ku + kl), kl].
    double& at(int i, int j) { return ab_[index(i, j)]; }
    double get(int i, int j) const { return ab_[index(i, j)]; }

    /// Max row sum of |a_ij| over the assembly band.
    double norm_inf() const;

    /// y = A x over the assembly band [-ku, kl].
    void multiply(std::span<const double> x, std::span<double> y) const;

private:
    size_t index(int i, int j) const;
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;

    friend class BandedLU;
};

/// LU factorization with partial pivoting of a banded matrix.
class BandedLU {
public:
    explicit BandedLU(const BandedMatrix& a);

    void solve(std::span<double> rhs) const;

    /// Cheap conditioning proxy: ||A||_inf / min |pivot|.
    double condition_estimate() const;
    bool singular() const { return singular_; }

private:
    BandedMatrix f_;
    std::vector<int> pivot_;
    double norm_inf_a_ = 0.0;
    double min_pivot_ = 0.0;
    bool singular_ = false;
};

}  // namespace clab
